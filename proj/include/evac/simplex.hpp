#pragma once

#include <algorithm>
#include <chrono>
#include <functional>
#include <vector>

#include "evac/rational.hpp"

namespace evac::lp {

// Scalar policies: exact rationals, or doubles with tolerances for the
// warm-start pass.
struct RatTraits {
    using Num = Rat;
    static Num zero() { return Rat(0); }
    static bool is_zero(const Num& x) { return x == 0; }
    static bool is_pos(const Num& x) { return x > 0; }
    static bool is_neg(const Num& x) { return x < 0; }
    static bool pivot_ok(const Num& x) { return x != 0; }
};

struct DblTraits {
    using Num = double;
    static constexpr double kEps = 1e-9;
    static constexpr double kTol = 1e-7;
    static Num zero() { return 0.0; }
    static bool is_zero(double x) { return x > -kTol && x < kTol; }
    static bool is_pos(double x) { return x > kTol; }
    static bool is_neg(double x) { return x < -kTol; }
    static bool pivot_ok(double x) { return x > 1e-8 || x < -1e-8; }
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterLimit };

// Bounded-variable LP in computational form: maximize c'x over columns of A
// (structural variables only; one slack per row is appended internally).
template <typename Num>
struct Problem {
    int n_struct = 0;
    int m = 0;
    // sparse columns of structural variables: (row, coef)
    std::vector<std::vector<std::pair<int, Num>>> cols;
    std::vector<Num> b;
    std::vector<Num> c;
    std::vector<Num> lb, ub;
    std::vector<uint8_t> has_lb, has_ub;
    // slack bounds per row (relation encoded through them)
    std::vector<Num> slack_lb, slack_ub;
    std::vector<uint8_t> slack_has_lb, slack_has_ub;

    int n_total() const { return n_struct + m; }
};

enum class VarState : uint8_t { Basic, AtLb, AtUb, FreeZero };

struct Basis {
    std::vector<int> basic;          // basis position -> variable
    std::vector<VarState> state;     // per variable
    bool valid = false;
};

template <typename Num>
struct LpResult {
    LpStatus status = LpStatus::IterLimit;
    std::vector<Num> x;      // all variables incl. slacks
    Num objective{};
    Basis basis;
    long iterations = 0;
    bool duality_checked = false;
};

// Primal bounded-variable simplex with a product-form basis inverse.
// Dantzig pricing with a Bland fallback after a degeneracy streak; exact
// instantiation terminates by Bland's rule.
template <typename Traits>
class Simplex {
    using Num = typename Traits::Num;

public:
    explicit Simplex(const Problem<Num>& prob) : p_(prob) {}

    // deadline: steady-clock time point after which IterLimit is returned
    LpResult<Num> solve(const Basis* warm = nullptr,
                        std::chrono::steady_clock::time_point deadline =
                            std::chrono::steady_clock::time_point::max(),
                        long iter_limit = -1);

private:
    const Problem<Num>& p_;

    struct Eta {
        int row;
        Num pivot;
        std::vector<std::pair<int, Num>> others;
    };

    std::vector<int> basic_;
    std::vector<VarState> state_;
    std::vector<Eta> etas_;
    std::vector<int> row_of_pos_;   // basis position -> pivot row
    std::vector<int> pos_of_row_;
    std::vector<Num> xb_;           // value per basis position
    long pivots_since_refactor_ = 0;

    bool var_has_lb(int v) const { return v < p_.n_struct ? p_.has_lb[v] : p_.slack_has_lb[v - p_.n_struct]; }
    bool var_has_ub(int v) const { return v < p_.n_struct ? p_.has_ub[v] : p_.slack_has_ub[v - p_.n_struct]; }
    const Num& var_lb(int v) const { return v < p_.n_struct ? p_.lb[v] : p_.slack_lb[v - p_.n_struct]; }
    const Num& var_ub(int v) const { return v < p_.n_struct ? p_.ub[v] : p_.slack_ub[v - p_.n_struct]; }
    Num var_cost(int v) const { return v < p_.n_struct ? p_.c[v] : Traits::zero(); }

    void column_of(int v, std::vector<std::pair<int, Num>>& out) const {
        out.clear();
        if (v < p_.n_struct) {
            for (const auto& [r, a] : p_.cols[v]) out.push_back({r, a});
        } else {
            out.push_back({v - p_.n_struct, Num(1)});
        }
    }

    Num nonbasic_value(int v) const {
        switch (state_[v]) {
            case VarState::AtLb: return var_lb(v);
            case VarState::AtUb: return var_ub(v);
            default: return Traits::zero();
        }
    }

    void ftran(std::vector<Num>& v) const;
    void btran(std::vector<Num>& v) const;
    bool refactor();
    void compute_xb();
    bool default_basis();
    bool import_basis(const Basis& warm);
};

using ExactSimplex = Simplex<RatTraits>;
using FloatSimplex = Simplex<DblTraits>;

extern template class Simplex<RatTraits>;
extern template class Simplex<DblTraits>;

}  // namespace evac::lp
