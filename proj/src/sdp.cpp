#include "dwellcert/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>

namespace dwellcert {

SymMatrix SdpBlock::constant_part(int) const {
    SymMatrix s(dim);
    for (const auto& t : terms)
        if (t.var < 0) s.add(t.row, t.col, t.value);
    return s;
}

SymMatrix SdpBlock::evaluate(const std::vector<double>& x) const {
    SymMatrix s(dim);
    for (const auto& t : terms) {
        const double w = (t.var < 0) ? 1.0 : x[static_cast<std::size_t>(t.var)];
        if (w != 0.0) s.add(t.row, t.col, t.value * w);
    }
    return s;
}

bool SdpProblem::pure_feasibility() const {
    for (double c : objective)
        if (c != 0.0) return false;
    return true;
}

const char* to_string(SdpStatus s) {
    switch (s) {
        case SdpStatus::Feasible: return "feasible";
        case SdpStatus::Infeasible: return "infeasible";
        case SdpStatus::Marginal: return "marginal";
        default: return "numerical_failure";
    }
}

double verify(const SdpProblem& p, const std::vector<double>& x) {
    double margin = std::numeric_limits<double>::infinity();
    for (const auto& b : p.blocks) {
        const auto ev = sym_eig(b.evaluate(x));
        margin = std::min(margin, ev.front());
    }
    return margin;
}

double equality_violation(const SdpProblem& p, const std::vector<double>& x) {
    double worst = 0.0;
    for (const auto& e : p.equalities) {
        double v = -e.rhs;
        for (const auto& [var, coef] : e.terms) v += coef * x[static_cast<std::size_t>(var)];
        worst = std::max(worst, std::abs(v));
    }
    return worst;
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// ---- equality elimination -------------------------------------------------

struct LinExpr {
    std::vector<std::pair<int, double>> terms;  // over free-variable indices
    double cst = 0.0;
};

struct Subst {
    int n_orig = 0;
    int n_free = 0;
    std::vector<int> free_of;       // orig var -> free index, or -1 if basic
    std::vector<int> orig_of;       // free index -> orig var
    std::vector<LinExpr> basic;     // orig var -> expression (basic vars only)
    bool inconsistent = false;
};

using Row = std::map<int, double>;

// Sparse Gaussian elimination with greedy low-fill pivoting. The equality
// systems this toolkit produces are mostly coefficient-matching rows where at
// least one variable occurs in a single row, so fill stays negligible.
Subst eliminate_equalities(const std::vector<SdpEquality>& eqs, int nvars) {
    Subst sub;
    sub.n_orig = nvars;
    sub.free_of.assign(nvars, 0);

    std::vector<Row> rows;
    std::vector<double> rhs;
    rows.reserve(eqs.size());
    for (const auto& e : eqs) {
        Row r;
        double scale = 0.0;
        for (const auto& [v, c] : e.terms) scale = std::max(scale, std::abs(c));
        if (scale == 0.0) {
            if (std::abs(e.rhs) > 1e-9) sub.inconsistent = true;
            continue;
        }
        for (const auto& [v, c] : e.terms)
            if (c != 0.0) r[v] += c / scale;
        for (auto it = r.begin(); it != r.end();)
            it = (it->second == 0.0) ? r.erase(it) : std::next(it);
        rows.push_back(std::move(r));
        rhs.push_back(e.rhs / scale);
    }

    std::vector<int> colcount(nvars, 0);
    for (const auto& r : rows)
        for (const auto& [v, c] : r) ++colcount[v];

    const std::size_t nrows = rows.size();
    std::vector<char> done(nrows, 0);
    std::vector<std::pair<int, std::size_t>> pivots;  // (var, row) in elimination order

    for (std::size_t step = 0; step < nrows; ++step) {
        // pick the (row, var) pair with the smallest fill estimate
        long best_score = std::numeric_limits<long>::max();
        double best_mag = 0.0;
        std::size_t best_row = nrows;
        int best_var = -1;
        for (std::size_t r = 0; r < nrows; ++r) {
            if (done[r]) continue;
            if (rows[r].empty()) {
                if (std::abs(rhs[r]) > 1e-8) sub.inconsistent = true;
                done[r] = 1;
                continue;
            }
            double rowmax = 0.0;
            for (const auto& [v, c] : rows[r]) rowmax = std::max(rowmax, std::abs(c));
            for (const auto& [v, c] : rows[r]) {
                if (std::abs(c) < 0.01 * rowmax) continue;  // keep pivots well scaled
                const long score =
                    static_cast<long>(rows[r].size() - 1) * (colcount[v] - 1);
                if (score < best_score ||
                    (score == best_score && std::abs(c) > best_mag)) {
                    best_score = score;
                    best_mag = std::abs(c);
                    best_row = r;
                    best_var = v;
                }
            }
        }
        if (best_row == nrows) break;  // all remaining rows were empty

        done[best_row] = 1;
        pivots.emplace_back(best_var, best_row);
        const Row& prow = rows[best_row];
        const double pc = prow.at(best_var);
        for (std::size_t r = 0; r < nrows; ++r) {
            if (done[r]) continue;
            auto it = rows[r].find(best_var);
            if (it == rows[r].end()) continue;
            const double f = it->second / pc;
            rows[r].erase(it);
            --colcount[best_var];
            for (const auto& [v, c] : prow) {
                if (v == best_var) continue;
                auto [jt, inserted] = rows[r].emplace(v, 0.0);
                if (inserted) ++colcount[v];
                jt->second -= f * c;
                if (std::abs(jt->second) < 1e-14) {
                    rows[r].erase(jt);
                    --colcount[v];
                }
            }
            rhs[r] -= f * rhs[best_row];
        }
    }
    for (std::size_t r = 0; r < nrows; ++r)
        if (!done[r] && rows[r].empty() && std::abs(rhs[r]) > 1e-8) sub.inconsistent = true;

    // classify variables
    std::vector<char> is_basic(nvars, 0);
    for (const auto& [v, r] : pivots) is_basic[v] = 1;
    sub.orig_of.reserve(nvars - pivots.size());
    for (int v = 0; v < nvars; ++v) {
        if (is_basic[v]) {
            sub.free_of[v] = -1;
        } else {
            sub.free_of[v] = static_cast<int>(sub.orig_of.size());
            sub.orig_of.push_back(v);
        }
    }
    sub.n_free = static_cast<int>(sub.orig_of.size());

    // back-substitute in reverse pivot order
    sub.basic.resize(nvars);
    for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
        const auto [pvar, prow_i] = *it;
        const Row& prow = rows[prow_i];
        const double pc = prow.at(pvar);
        std::map<int, double> acc;  // over free indices
        double cst = rhs[prow_i];
        for (const auto& [v, c] : prow) {
            if (v == pvar) continue;
            if (sub.free_of[v] >= 0) {
                acc[sub.free_of[v]] -= c;
            } else {
                const LinExpr& ex = sub.basic[v];
                cst -= c * ex.cst;
                for (const auto& [fv, fc] : ex.terms) acc[fv] -= c * fc;
            }
        }
        LinExpr ex;
        ex.cst = cst / pc;
        for (const auto& [fv, fc] : acc)
            if (fc != 0.0) ex.terms.emplace_back(fv, fc / pc);
        sub.basic[pvar] = std::move(ex);
    }
    return sub;
}

// ---- reduced problem ------------------------------------------------------

struct REntry {
    int r, c;
    double v;
};

struct RBlock {
    int dim = 0;
    std::vector<REntry> const_entries;
    std::vector<int> vars;                    // free indices, ascending
    std::vector<std::vector<REntry>> coeffs;  // parallel to vars
};

struct Reduced {
    int nfree = 0;
    std::vector<RBlock> blocks;
    VectorXd c;          // minimize c^T y
    double obj_offset = 0.0;
};

RBlock reduce_block(const SdpBlock& b, const Subst& sub, double scale) {
    std::map<int, std::map<std::pair<int, int>, double>> acc;  // free var (-1 const) -> entries
    auto put = [&](int fv, int r, int c, double v) {
        if (v != 0.0) acc[fv][{r, c}] += v;
    };
    for (const auto& t : b.terms) {
        const double v = t.value / scale;
        if (t.var < 0) {
            put(-1, t.row, t.col, v);
        } else if (sub.free_of[t.var] >= 0) {
            put(sub.free_of[t.var], t.row, t.col, v);
        } else {
            const LinExpr& ex = sub.basic[t.var];
            put(-1, t.row, t.col, v * ex.cst);
            for (const auto& [fv, fc] : ex.terms) put(fv, t.row, t.col, v * fc);
        }
    }
    RBlock rb;
    rb.dim = b.dim;
    for (auto& [fv, entries] : acc) {
        std::vector<REntry> es;
        es.reserve(entries.size());
        for (const auto& [rc, v] : entries)
            if (std::abs(v) > 1e-300) es.push_back({rc.first, rc.second, v});
        if (es.empty()) continue;
        if (fv < 0) {
            rb.const_entries = std::move(es);
        } else {
            rb.vars.push_back(fv);
            rb.coeffs.push_back(std::move(es));
        }
    }
    return rb;
}

MatrixXd dense_of(const std::vector<REntry>& es, int dim) {
    MatrixXd m = MatrixXd::Zero(dim, dim);
    for (const auto& e : es) {
        m(e.r, e.c) += e.v;
        if (e.r != e.c) m(e.c, e.r) += e.v;
    }
    return m;
}

double sparse_dot(const std::vector<REntry>& es, const MatrixXd& m) {
    double s = 0.0;
    for (const auto& e : es) s += e.v * ((e.r == e.c) ? m(e.r, e.c) : 2.0 * m(e.r, e.c));
    return s;
}

// largest step a with X + a dX >= 0, given the Cholesky factor of X
double max_step(const Eigen::LLT<MatrixXd>& llt, const MatrixXd& dx) {
    MatrixXd a = llt.matrixL().solve(dx);
    a = llt.matrixL().solve(a.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (a + a.transpose()),
                                               Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin >= -1e-14) return 1e30;
    return -1.0 / lmin;
}

struct NtScaling {
    MatrixXd wi;   // W^{-1}
    MatrixXd sinv;
    bool ok = false;
};

NtScaling nt_scaling(const Eigen::LLT<MatrixXd>& slt, const MatrixXd& y) {
    NtScaling nt;
    const MatrixXd ls = slt.matrixL();
    const MatrixXd t = ls.transpose() * y * ls;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (t + t.transpose()));
    if (es.info() != Eigen::Success) return nt;
    VectorXd lam = es.eigenvalues();
    for (int i = 0; i < lam.size(); ++i) {
        if (!(lam(i) > 0.0)) return nt;
        lam(i) = std::sqrt(lam(i));
    }
    const MatrixXd b = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
    // W^{-1} = L^{-T} B L^{-1}  (B symmetric)
    MatrixXd tmp = slt.matrixU().solve(b);                       // L^{-T} B
    MatrixXd wi = slt.matrixU().solve(tmp.transpose());          // L^{-T} B L^{-1}
    nt.wi = 0.5 * (wi + wi.transpose());
    MatrixXd id = MatrixXd::Identity(y.rows(), y.cols());
    MatrixXd si = slt.solve(id);
    nt.sinv = 0.5 * (si + si.transpose());
    nt.ok = true;
    return nt;
}

struct Work {
    std::vector<MatrixXd> s, yd;          // slack and dual per block
    std::vector<Eigen::LLT<MatrixXd>> slt;
    std::vector<NtScaling> nt;
    std::vector<MatrixXd> rp;             // G(y) - S
    VectorXd rd;
};

}  // namespace

SdpSolution solve(const SdpProblem& p, const SolverOptions& opts) {
    SdpSolution out;
    const int n_orig = p.num_vars;

    for (const auto& b : p.blocks)
        for (const auto& t : b.terms)
            if (t.var >= n_orig || t.row >= b.dim || t.col >= b.dim || !std::isfinite(t.value))
                throw std::invalid_argument("sdp: malformed block term");
    for (const auto& e : p.equalities)
        for (const auto& [v, c] : e.terms)
            if (v < 0 || v >= n_orig || !std::isfinite(c))
                throw std::invalid_argument("sdp: malformed equality");

    const bool augment = p.pure_feasibility() && opts.feas_var < 0;
    const int nvars = n_orig + (augment ? 1 : 0);
    const int t_var = augment ? n_orig : opts.feas_var;

    // per-block data scales (original entries)
    std::vector<double> bscale(p.blocks.size(), 1.0);
    for (std::size_t j = 0; j < p.blocks.size(); ++j) {
        double s = 0.0;
        for (const auto& t : p.blocks[j].terms) s = std::max(s, std::abs(t.value));
        bscale[j] = (s > 0.0) ? s : 1.0;
    }

    Subst sub = eliminate_equalities(p.equalities, nvars);
    if (sub.inconsistent) {
        out.status = SdpStatus::Infeasible;
        out.x.assign(static_cast<std::size_t>(n_orig), 0.0);
        return out;
    }

    Reduced red;
    red.nfree = sub.n_free;
    red.blocks.reserve(p.blocks.size() + 1);
    for (std::size_t j = 0; j < p.blocks.size(); ++j) {
        RBlock rb = reduce_block(p.blocks[j], sub, bscale[j]);
        if (augment) {
            // F_j(x)/scale - t I >= 0
            std::vector<REntry> diag(static_cast<std::size_t>(rb.dim));
            for (int i = 0; i < rb.dim; ++i) diag[static_cast<std::size_t>(i)] = {i, i, -1.0};
            const int tf = sub.free_of[t_var];
            auto pos = std::lower_bound(rb.vars.begin(), rb.vars.end(), tf);
            rb.coeffs.insert(rb.coeffs.begin() + (pos - rb.vars.begin()), std::move(diag));
            rb.vars.insert(pos, tf);
        }
        red.blocks.push_back(std::move(rb));
    }
    if (augment) {
        // cap block: t_cap - t >= 0
        RBlock cap;
        cap.dim = 1;
        cap.const_entries = {{0, 0, opts.t_cap}};
        cap.vars = {sub.free_of[t_var]};
        cap.coeffs = {{{0, 0, -1.0}}};
        red.blocks.push_back(std::move(cap));
    }

    // reduced objective: minimize c^T x (or -t for feasibility problems)
    std::vector<double> cfull(static_cast<std::size_t>(nvars), 0.0);
    if (augment) {
        cfull[static_cast<std::size_t>(t_var)] = -1.0;
    } else {
        for (std::size_t i = 0; i < p.objective.size() && i < cfull.size(); ++i)
            cfull[i] = p.objective[i];
    }
    red.c = VectorXd::Zero(red.nfree);
    red.obj_offset = 0.0;
    for (int v = 0; v < nvars; ++v) {
        const double cv = cfull[static_cast<std::size_t>(v)];
        if (cv == 0.0) continue;
        if (sub.free_of[v] >= 0) {
            red.c(sub.free_of[v]) += cv;
        } else {
            red.obj_offset += cv * sub.basic[v].cst;
            for (const auto& [fv, fc] : sub.basic[v].terms) red.c(fv) += cv * fc;
        }
    }

    auto recover_x = [&](const VectorXd& y) {
        std::vector<double> x(static_cast<std::size_t>(nvars), 0.0);
        for (int v = 0; v < nvars; ++v) {
            if (sub.free_of[v] >= 0) {
                x[static_cast<std::size_t>(v)] = y(sub.free_of[v]);
            } else {
                double s = sub.basic[v].cst;
                for (const auto& [fv, fc] : sub.basic[v].terms) s += fc * y(fv);
                x[static_cast<std::size_t>(v)] = s;
            }
        }
        return x;
    };
    auto classify = [&](double t) {
        if (t > opts.feas_tol) return SdpStatus::Feasible;
        if (t < -opts.feas_tol) return SdpStatus::Infeasible;
        return SdpStatus::Marginal;
    };
    auto finish = [&](const VectorXd& y, SdpStatus st, int iters) {
        std::vector<double> x = recover_x(y);
        out.feas_level = (t_var >= 0) ? x[static_cast<std::size_t>(t_var)] : 0.0;
        x.resize(static_cast<std::size_t>(n_orig));
        out.x = std::move(x);
        out.status = st;
        out.iterations = iters;
        out.margin = verify(p, out.x);
        out.objective = 0.0;
        for (std::size_t i = 0; i < p.objective.size(); ++i) out.objective += p.objective[i] * out.x[i];
        return out;
    };

    const int K = red.nfree;
    if (K == 0) {
        // fully determined by the equalities
        VectorXd y(0);
        const std::vector<double> x = recover_x(y);
        const double margin = verify(p, x);
        return finish(y, classify(margin), 0);
    }

    // ---- primal-dual NT path following -------------------------------------
    Work w;
    const std::size_t nb = red.blocks.size();
    w.s.resize(nb);
    w.yd.resize(nb);
    w.slt.resize(nb);
    w.nt.resize(nb);
    w.rp.resize(nb);

    VectorXd y = VectorXd::Zero(K);
    double ntotal = 0.0;
    for (std::size_t j = 0; j < nb; ++j) {
        const RBlock& rb = red.blocks[j];
        MatrixXd g0 = dense_of(rb.const_entries, rb.dim);
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(g0, Eigen::EigenvaluesOnly);
        const double lmin = es.eigenvalues().minCoeff();
        const double shift = (lmin < 1.0) ? (1.0 - 1.5 * std::min(lmin, 0.0) + 0.1) : 0.0;
        w.s[j] = g0 + shift * MatrixXd::Identity(rb.dim, rb.dim);
        w.yd[j] = MatrixXd::Identity(rb.dim, rb.dim);
        ntotal += rb.dim;
    }

    int iter = 0;
    MatrixXd m(K, K);
    for (; iter < opts.max_iters; ++iter) {
        // residuals
        double pres = 0.0;
        for (std::size_t j = 0; j < nb; ++j) {
            const RBlock& rb = red.blocks[j];
            MatrixXd g = dense_of(rb.const_entries, rb.dim);
            for (std::size_t l = 0; l < rb.vars.size(); ++l) {
                const double yv = y(rb.vars[l]);
                if (yv == 0.0) continue;
                for (const auto& e : rb.coeffs[l]) {
                    g(e.r, e.c) += yv * e.v;
                    if (e.r != e.c) g(e.c, e.r) += yv * e.v;
                }
            }
            w.rp[j] = g - w.s[j];
            pres = std::max(pres, w.rp[j].cwiseAbs().maxCoeff() /
                                      (1.0 + g.cwiseAbs().maxCoeff()));
        }
        w.rd = red.c;
        for (std::size_t j = 0; j < nb; ++j) {
            const RBlock& rb = red.blocks[j];
            for (std::size_t l = 0; l < rb.vars.size(); ++l)
                w.rd(rb.vars[l]) -= sparse_dot(rb.coeffs[l], w.yd[j]);
        }
        const double dres = w.rd.cwiseAbs().maxCoeff() / (1.0 + red.c.cwiseAbs().maxCoeff());

        double gap = 0.0, dobj = 0.0;
        for (std::size_t j = 0; j < nb; ++j) {
            gap += (w.s[j].array() * w.yd[j].array()).sum();
            dobj -= (dense_of(red.blocks[j].const_entries, red.blocks[j].dim).array() *
                     w.yd[j].array())
                        .sum();
        }
        const double mu = gap / ntotal;
        const double pobj = red.c.dot(y) + red.obj_offset;
        const double relgap = gap / (1.0 + std::abs(pobj) + std::abs(dobj));

        if (opts.verbose)
            std::fprintf(stderr, "it %3d  mu %9.2e  gap %9.2e  pres %9.2e  dres %9.2e\n",
                         iter, mu, relgap, pres, dres);

        const bool converged = relgap <= opts.gap_tol && pres <= opts.res_tol * 10 &&
                               dres <= opts.res_tol * 10;
        if (converged) {
            if (t_var >= 0) {
                const std::vector<double> xf = recover_x(y);
                return finish(y, classify(xf[static_cast<std::size_t>(t_var)]), iter);
            }
            const std::vector<double> xf = recover_x(y);
            const double mrg = verify(p, xf);
            return finish(y, (mrg > -opts.feas_tol) ? SdpStatus::Feasible : SdpStatus::Marginal,
                          iter);
        }

        if (opts.classify_only && t_var >= 0) {
            const double t_cur = recover_x(y)[static_cast<std::size_t>(t_var)];
            if (pres <= opts.res_tol && t_cur > 10.0 * opts.feas_tol)
                return finish(y, SdpStatus::Feasible, iter);
            // dual bound on the achievable level; only trusted once the dual
            // residual is small relative to the iterate size
            const double t_ub = -(dobj + red.obj_offset);
            const double slack = opts.feas_tol + dres * (1.0 + y.lpNorm<1>());
            if (dres <= opts.res_tol && t_ub < -slack)
                return finish(y, SdpStatus::Infeasible, iter);
        }

        // NT scalings
        bool scal_ok = true;
        for (std::size_t j = 0; j < nb; ++j) {
            w.slt[j].compute(w.s[j]);
            if (w.slt[j].info() != Eigen::Success) { scal_ok = false; break; }
            w.nt[j] = nt_scaling(w.slt[j], w.yd[j]);
            if (!w.nt[j].ok) { scal_ok = false; break; }
        }
        if (!scal_ok) break;

        // Schur complement M_kl = sum_j <G_jk, W^-1 G_jl W^-1>
        m.setZero();
        for (std::size_t j = 0; j < nb; ++j) {
            const RBlock& rb = red.blocks[j];
            const MatrixXd& wi = w.nt[j].wi;
            const std::size_t nv = rb.vars.size();
            for (std::size_t l = 0; l < nv; ++l) {
                MatrixXd v = MatrixXd::Zero(rb.dim, rb.dim);
                for (const auto& e : rb.coeffs[l]) {
                    v.noalias() += e.v * (wi.col(e.r) * wi.col(e.c).transpose());
                    if (e.r != e.c)
                        v.noalias() += e.v * (wi.col(e.c) * wi.col(e.r).transpose());
                }
                for (std::size_t k = 0; k <= l; ++k) {
                    const double dot = sparse_dot(rb.coeffs[k], v);
                    const int ki = rb.vars[k], li = rb.vars[l];
                    m(std::min(ki, li), std::max(ki, li)) += dot;
                }
            }
        }
        MatrixXd msym = m.selfadjointView<Eigen::Upper>();
        Eigen::LLT<MatrixXd> mllt(msym);
        if (mllt.info() != Eigen::Success) {
            const double ridge = 1e-12 * (1.0 + msym.diagonal().maxCoeff());
            for (int tries = 0; tries < 3 && mllt.info() != Eigen::Success; ++tries) {
                msym.diagonal().array() += ridge * std::pow(10.0, tries);
                mllt.compute(msym);
            }
            if (mllt.info() != Eigen::Success) break;
        }

        auto solve_direction = [&](double sigmamu, VectorXd& dy, std::vector<MatrixXd>& ds,
                                   std::vector<MatrixXd>& dyd) {
            VectorXd q = -w.rd;
            std::vector<MatrixXd> rmat(nb);
            for (std::size_t j = 0; j < nb; ++j) {
                const RBlock& rb = red.blocks[j];
                const auto& nt = w.nt[j];
                rmat[j] = sigmamu * nt.sinv - w.yd[j] - nt.wi * w.rp[j] * nt.wi;
                for (std::size_t k = 0; k < rb.vars.size(); ++k)
                    q(rb.vars[k]) += sparse_dot(rb.coeffs[k], rmat[j]);
            }
            dy = mllt.solve(q);
            ds.resize(nb);
            dyd.resize(nb);
            for (std::size_t j = 0; j < nb; ++j) {
                const RBlock& rb = red.blocks[j];
                MatrixXd dsj = w.rp[j];
                for (std::size_t l = 0; l < rb.vars.size(); ++l) {
                    const double dv = dy(rb.vars[l]);
                    if (dv == 0.0) continue;
                    for (const auto& e : rb.coeffs[l]) {
                        dsj(e.r, e.c) += dv * e.v;
                        if (e.r != e.c) dsj(e.c, e.r) += dv * e.v;
                    }
                }
                ds[j] = dsj;
                // dY = sigma mu S^-1 - Y - W^-1 dS W^-1
                MatrixXd dyj =
                    sigmamu * w.nt[j].sinv - w.yd[j] - w.nt[j].wi * dsj * w.nt[j].wi;
                dyd[j] = 0.5 * (dyj + dyj.transpose());
            }
        };

        auto step_lengths = [&](const std::vector<MatrixXd>& ds,
                                const std::vector<MatrixXd>& dyd) {
            double ap = 1e30, ad = 1e30;
            for (std::size_t j = 0; j < nb; ++j) {
                ap = std::min(ap, max_step(w.slt[j], ds[j]));
                Eigen::LLT<MatrixXd> ylt(w.yd[j]);
                if (ylt.info() == Eigen::Success) ad = std::min(ad, max_step(ylt, dyd[j]));
            }
            return std::pair<double, double>(std::min(1.0, 0.98 * ap),
                                             std::min(1.0, 0.98 * ad));
        };

        // predictor
        VectorXd dy_a;
        std::vector<MatrixXd> ds_a, dyd_a;
        solve_direction(0.0, dy_a, ds_a, dyd_a);
        auto [apa, ada] = step_lengths(ds_a, dyd_a);
        double gap_aff = 0.0;
        for (std::size_t j = 0; j < nb; ++j)
            gap_aff += ((w.s[j] + apa * ds_a[j]).array() * (w.yd[j] + ada * dyd_a[j]).array())
                           .sum();
        const double mu_aff = std::max(gap_aff, 0.0) / ntotal;
        double sigma = std::pow(mu_aff / mu, 3.0);
        sigma = std::clamp(sigma, 1e-8, 0.99);

        // corrector (same factorization, recentred right-hand side)
        VectorXd dy;
        std::vector<MatrixXd> ds, dyd;
        solve_direction(sigma * mu, dy, ds, dyd);
        auto [ap, ad] = step_lengths(ds, dyd);

        if (std::min(ap, ad) < opts.step_floor) break;

        y += ap * dy;
        for (std::size_t j = 0; j < nb; ++j) {
            w.s[j] += ap * ds[j];
            w.yd[j] += ad * dyd[j];
        }
    }

    // stalled or hit the iteration cap
    return finish(y, SdpStatus::NumericalFailure, iter);
}

void write_sdpa(const SdpProblem& p, const std::string& path) {
    Subst sub = eliminate_equalities(p.equalities, p.num_vars);
    std::vector<RBlock> blocks;
    blocks.reserve(p.blocks.size());
    for (const auto& b : p.blocks) blocks.push_back(reduce_block(b, sub, 1.0));

    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << "* reduced LMI problem (equalities eliminated)\n";
    f << sub.n_free << " = mDIM\n";
    f << blocks.size() << " = nBLOCK\n";
    for (std::size_t j = 0; j < blocks.size(); ++j) f << blocks[j].dim << (j + 1 < blocks.size() ? " " : "");
    f << " = bLOCKsTRUCT\n";
    // SDPA convention: min c^T x s.t. sum x_i F_i - F0 >= 0
    std::vector<double> cred(static_cast<std::size_t>(sub.n_free), 0.0);
    for (int v = 0; v < p.num_vars; ++v) {
        const double cv = (static_cast<std::size_t>(v) < p.objective.size()) ? p.objective[v] : 0.0;
        if (cv == 0.0) continue;
        if (sub.free_of[v] >= 0) {
            cred[static_cast<std::size_t>(sub.free_of[v])] += cv;
        } else {
            for (const auto& [fv, fc] : sub.basic[v].terms) cred[static_cast<std::size_t>(fv)] += cv * fc;
        }
    }
    for (std::size_t i = 0; i < cred.size(); ++i) f << cred[i] << (i + 1 < cred.size() ? " " : "");
    f << "\n";
    f.precision(17);
    for (std::size_t j = 0; j < blocks.size(); ++j) {
        for (const auto& e : blocks[j].const_entries)
            f << 0 << " " << j + 1 << " " << e.r + 1 << " " << e.c + 1 << " " << -e.v << "\n";
        for (std::size_t l = 0; l < blocks[j].vars.size(); ++l)
            for (const auto& e : blocks[j].coeffs[l])
                f << blocks[j].vars[l] + 1 << " " << j + 1 << " " << e.r + 1 << " " << e.c + 1
                  << " " << e.v << "\n";
    }
}

}  // namespace dwellcert
