#include "evac/simplex.hpp"

#include <stdexcept>

namespace evac::lp {

template <typename Traits>
void Simplex<Traits>::ftran(std::vector<Num>& v) const {
    for (const Eta& eta : etas_) {
        Num t = v[eta.row];
        if (t == Num(0)) continue;
        Num piv = t / eta.pivot;
        v[eta.row] = piv;
        for (const auto& [i, a] : eta.others) v[i] -= a * piv;
    }
}

template <typename Traits>
void Simplex<Traits>::btran(std::vector<Num>& y) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
        Num acc = y[it->row];
        for (const auto& [i, a] : it->others) acc -= a * y[i];
        y[it->row] = acc / it->pivot;
    }
}

template <typename Traits>
bool Simplex<Traits>::refactor() {
    int m = p_.m;
    etas_.clear();
    row_of_pos_.assign(m, -1);
    pos_of_row_.assign(m, -1);
    pivots_since_refactor_ = 0;

    // process positions in a fill-reducing order: fewest active rows first
    std::vector<std::vector<std::pair<int, Num>>> cols(m);
    std::vector<int> active(m);
    for (int j = 0; j < m; ++j) {
        column_of(basic_[j], cols[j]);
        active[j] = (int)cols[j].size();
    }
    std::vector<bool> row_done(m, false), col_done(m, false);
    std::vector<Num> work(m, Traits::zero());
    for (int step = 0; step < m; ++step) {
        int best = -1;
        for (int j = 0; j < m; ++j)
            if (!col_done[j] && (best < 0 || active[j] < active[best])) best = j;
        if (best < 0) return false;
        col_done[best] = true;
        // dense scatter, apply existing etas
        for (const auto& [r, a] : cols[best]) work[r] = a;
        ftran(work);
        int prow = -1;
        for (int r = 0; r < m; ++r)
            if (!row_done[r] && !Traits::is_zero(work[r]) && Traits::pivot_ok(work[r])) {
                prow = r;
                break;
            }
        if (prow < 0) {
            for (int r = 0; r < m; ++r) work[r] = Traits::zero();
            return false;  // singular basis
        }
        Eta eta;
        eta.row = prow;
        eta.pivot = work[prow];
        for (int r = 0; r < m; ++r) {
            if (r != prow && !Traits::is_zero(work[r])) eta.others.push_back({r, work[r]});
            work[r] = Traits::zero();
        }
        etas_.push_back(std::move(eta));
        row_done[prow] = true;
        row_of_pos_[best] = prow;
        pos_of_row_[prow] = best;
        // update active counts of remaining columns sharing this row
        for (int j = 0; j < m; ++j) {
            if (col_done[j]) continue;
            for (const auto& [r, a] : cols[j])
                if (r == prow) {
                    --active[j];
                    break;
                }
        }
    }
    // etas were appended in processing order; ftran/btran rely only on order
    return true;
}

template <typename Traits>
void Simplex<Traits>::compute_xb() {
    int m = p_.m;
    std::vector<Num> rhs(p_.b);
    std::vector<std::pair<int, Num>> col;
    for (int v = 0; v < p_.n_total(); ++v) {
        if (state_[v] == VarState::Basic) continue;
        Num x = nonbasic_value(v);
        if (Traits::is_zero(x)) continue;
        column_of(v, col);
        for (const auto& [r, a] : col) rhs[r] -= a * x;
    }
    ftran(rhs);
    xb_.assign(m, Traits::zero());
    for (int j = 0; j < m; ++j) xb_[j] = rhs[row_of_pos_[j]];
}

template <typename Traits>
bool Simplex<Traits>::default_basis() {
    int m = p_.m;
    basic_.resize(m);
    state_.assign(p_.n_total(), VarState::AtLb);
    for (int v = 0; v < p_.n_struct; ++v) {
        if (p_.has_lb[v]) state_[v] = VarState::AtLb;
        else if (p_.has_ub[v]) state_[v] = VarState::AtUb;
        else state_[v] = VarState::FreeZero;
    }
    for (int i = 0; i < m; ++i) {
        basic_[i] = p_.n_struct + i;
        state_[p_.n_struct + i] = VarState::Basic;
    }
    if (!refactor()) return false;
    compute_xb();
    return true;
}

template <typename Traits>
bool Simplex<Traits>::import_basis(const Basis& warm) {
    if (!warm.valid || (int)warm.basic.size() != p_.m ||
        (int)warm.state.size() != p_.n_total())
        return false;
    basic_ = warm.basic;
    state_ = warm.state;
    std::vector<bool> used(p_.n_total(), false);
    for (int v : basic_) {
        if (v < 0 || v >= p_.n_total() || used[v]) return false;
        used[v] = true;
    }
    for (int v = 0; v < p_.n_total(); ++v) {
        bool is_basic = state_[v] == VarState::Basic;
        if (is_basic != used[v]) return false;
        if (!is_basic) {
            if (state_[v] == VarState::AtLb && !var_has_lb(v))
                state_[v] = var_has_ub(v) ? VarState::AtUb : VarState::FreeZero;
            if (state_[v] == VarState::AtUb && !var_has_ub(v))
                state_[v] = var_has_lb(v) ? VarState::AtLb : VarState::FreeZero;
        }
    }
    if (!refactor()) return false;
    compute_xb();
    return true;
}

template <typename Traits>
LpResult<typename Traits::Num> Simplex<Traits>::solve(
    const Basis* warm, std::chrono::steady_clock::time_point deadline, long iter_limit) {
    LpResult<Num> res;
    int m = p_.m, n = p_.n_total();
    if (!(warm && import_basis(*warm))) {
        if (!default_basis()) throw std::logic_error("slack basis is singular");
    }

    std::vector<Num> y(m), w(m);
    std::vector<std::pair<int, Num>> col;
    bool bland = false;
    int degenerate_streak = 0;
    long refactor_every = std::max<long>(64, m / 8);

    auto infeasibility = [&](int j) -> int {
        // -1 below lb, +1 above ub, 0 feasible
        int v = basic_[j];
        if (var_has_lb(v) && xb_[j] < var_lb(v)) return -1;
        if (var_has_ub(v) && xb_[j] > var_ub(v)) return 1;
        return 0;
    };

    for (long iter = 0;; ++iter) {
        auto bail = [&](long it) {
            res.status = LpStatus::IterLimit;
            res.iterations = it;
            res.basis.basic = basic_;
            res.basis.state = state_;
            res.basis.valid = true;
            return res;
        };
        if (iter_limit >= 0 && iter > iter_limit) return bail(iter);
        if ((iter & 0xff) == 0 && std::chrono::steady_clock::now() > deadline)
            return bail(iter);

        bool phase1 = false;
        for (int j = 0; j < m && !phase1; ++j) phase1 = infeasibility(j) != 0;

        // duals of the working objective
        std::fill(y.begin(), y.end(), Traits::zero());
        for (int j = 0; j < m; ++j) {
            Num cost = phase1 ? Num(-infeasibility(j)) : var_cost(basic_[j]);
            if (!Traits::is_zero(cost)) y[row_of_pos_[j]] = cost;
        }
        btran(y);

        // pricing
        int enter = -1, sigma = 0;
        Num best_score = Traits::zero();
        for (int v = 0; v < n; ++v) {
            if (state_[v] == VarState::Basic) continue;
            Num d = phase1 ? Traits::zero() : var_cost(v);
            if (v < p_.n_struct) {
                for (const auto& [r, a] : p_.cols[v]) d -= a * y[r];
            } else {
                d -= y[v - p_.n_struct];
            }
            int dir = 0;
            if (state_[v] == VarState::AtLb || state_[v] == VarState::FreeZero) {
                if (Traits::is_pos(d)) dir = 1;
            }
            if (dir == 0 && (state_[v] == VarState::AtUb || state_[v] == VarState::FreeZero)) {
                if (Traits::is_neg(d)) dir = -1;
            }
            if (dir == 0) continue;
            Num score = dir > 0 ? d : -d;
            if (bland) {
                enter = v;
                sigma = dir;
                break;
            }
            if (enter < 0 || score > best_score) {
                enter = v;
                sigma = dir;
                best_score = score;
            }
        }

        if (enter < 0) {
            if (phase1) {
                res.status = LpStatus::Infeasible;
                res.iterations = iter;
                return res;
            }
            // optimal: collect the solution
            res.status = LpStatus::Optimal;
            res.iterations = iter;
            res.x.assign(n, Traits::zero());
            for (int v = 0; v < n; ++v)
                if (state_[v] != VarState::Basic) res.x[v] = nonbasic_value(v);
            for (int j = 0; j < m; ++j) res.x[basic_[j]] = xb_[j];
            res.objective = Traits::zero();
            for (int v = 0; v < p_.n_struct; ++v) res.objective += p_.c[v] * res.x[v];
            res.basis.basic = basic_;
            res.basis.state = state_;
            res.basis.valid = true;
            return res;
        }

        column_of(enter, col);
        std::fill(w.begin(), w.end(), Traits::zero());
        for (const auto& [r, a] : col) w[r] = a;
        ftran(w);

        // ratio test
        bool have_t = false, flip = false;
        Num t{};
        int leave_pos = -1, leave_dir = 0;  // +1 leaves at ub, -1 at lb
        if (state_[enter] == VarState::AtLb && sigma > 0 && var_has_ub(enter)) {
            t = var_ub(enter) - var_lb(enter);
            have_t = true;
            flip = true;
        } else if (state_[enter] == VarState::AtUb && sigma < 0 && var_has_lb(enter)) {
            t = var_ub(enter) - var_lb(enter);
            have_t = true;
            flip = true;
        }
        for (int j = 0; j < m; ++j) {
            Num rate = w[row_of_pos_[j]];
            if (Traits::is_zero(rate)) continue;
            rate = sigma > 0 ? -rate : rate;  // d(xb_j)/dt along the move
            int vb = basic_[j];
            int inf = infeasibility(j);
            Num cand;
            int dir;
            if (Traits::is_pos(rate)) {
                // moving up: blocks at lb when below it, else at ub
                if (inf > 0) continue;
                if (inf < 0) {
                    cand = (var_lb(vb) - xb_[j]) / rate;
                    dir = -1;
                } else if (var_has_ub(vb)) {
                    cand = (var_ub(vb) - xb_[j]) / rate;
                    dir = 1;
                } else {
                    continue;
                }
            } else {
                if (inf < 0) continue;
                if (inf > 0) {
                    cand = (var_ub(vb) - xb_[j]) / rate;
                    dir = 1;
                } else if (var_has_lb(vb)) {
                    cand = (var_lb(vb) - xb_[j]) / rate;
                    dir = -1;
                } else {
                    continue;
                }
            }
            if (Traits::is_neg(cand)) cand = Traits::zero();
            bool better = !have_t || cand < t;
            if (!better && !flip && leave_pos >= 0 && cand == t &&
                basic_[j] < basic_[leave_pos])
                better = true;  // deterministic tie-break by variable index
            if (better) {
                have_t = true;
                t = cand;
                flip = false;
                leave_pos = j;
                leave_dir = dir;
            }
        }

        if (!have_t) {
            if (phase1) throw std::logic_error("phase-1 direction unbounded");
            res.status = LpStatus::Unbounded;
            res.iterations = iter;
            return res;
        }

        if (Traits::is_zero(t)) {
            if (++degenerate_streak > 64) bland = true;
        } else {
            degenerate_streak = 0;
            bland = false;
        }

        // apply the step
        if (!Traits::is_zero(t)) {
            for (int j = 0; j < m; ++j) {
                Num rate = w[row_of_pos_[j]];
                if (Traits::is_zero(rate)) continue;
                xb_[j] -= (sigma > 0 ? rate : -rate) * t;
            }
        }
        if (flip) {
            state_[enter] =
                state_[enter] == VarState::AtLb ? VarState::AtUb : VarState::AtLb;
            continue;
        }
        int leave_var = basic_[leave_pos];
        Num enter_val = nonbasic_value(enter);
        enter_val += sigma > 0 ? t : -t;
        int prow = row_of_pos_[leave_pos];
        if (!Traits::pivot_ok(w[prow]))
            throw std::logic_error("degenerate pivot element");
        Eta eta;
        eta.row = prow;
        eta.pivot = w[prow];
        for (int r = 0; r < m; ++r)
            if (r != prow && !Traits::is_zero(w[r])) eta.others.push_back({r, w[r]});
        etas_.push_back(std::move(eta));
        basic_[leave_pos] = enter;
        xb_[leave_pos] = enter_val;
        state_[enter] = VarState::Basic;
        state_[leave_var] = leave_dir > 0 ? VarState::AtUb : VarState::AtLb;
        if (!var_has_ub(leave_var) && state_[leave_var] == VarState::AtUb)
            state_[leave_var] = VarState::FreeZero;
        if (!var_has_lb(leave_var) && state_[leave_var] == VarState::AtLb)
            state_[leave_var] = VarState::FreeZero;

        if (++pivots_since_refactor_ > refactor_every) {
            if (!refactor()) throw std::logic_error("refactorization failed");
            compute_xb();
        }
    }
}

template class Simplex<RatTraits>;
template class Simplex<DblTraits>;

}  // namespace evac::lp
