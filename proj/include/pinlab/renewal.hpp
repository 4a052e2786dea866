#pragma once

// Heavy-tailed return laws K(n) = phi(n) / n^{1+alpha}, truncated at n_max and
// renormalized, together with the renewal quantities built on top of them.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pinlab/rng.hpp"

namespace pinlab::renewal {

/// phi(n) = c.
struct ConstantPhi {
    double c = 1.0;
};

/// phi(n) = c * (1 + log n)^p.
struct LogPowerPhi {
    double c = 1.0;
    double p = 0.0;
};

/// Hand-specified mass vector, used for small exactly solvable test laws.
struct ExplicitMass {};

using PhiKind = std::variant<ConstantPhi, LogPowerPhi, ExplicitMass>;

/// Truncated mass above which build_return_law raises its warning flag.
inline constexpr double kTailWarningLevel = 1e-6;

class ReturnLaw {
public:
    /// K(n) proportional to phi(n)/n^{1+alpha} on 1..n_max, renormalized to
    /// sum to one.
    static ReturnLaw build(double alpha, PhiKind phi, std::size_t n_max);

    /// Arbitrary positive masses on 1..masses.size(), renormalized. A law with
    /// mean one (K(1) = 1) is only accepted when declared as a test law.
    static ReturnLaw from_masses(std::vector<double> masses, bool declared_test_law = false);

    /// K(n) = (1-p) p^{n-1}, truncated at n_max. A test law with closed-form
    /// Laplace transform.
    static ReturnLaw geometric(double p, std::size_t n_max);

    /// Parses the key-value block produced by serialize().
    static ReturnLaw parse(const std::string& text);

    /// Tail exponent; NaN for explicit-mass laws.
    double alpha() const { return alpha_; }
    const PhiKind& phi_kind() const { return phi_; }
    std::size_t n_max() const { return mass_.size(); }
    double mu() const { return mu_; }
    bool declared_test_law() const { return test_law_; }

    /// K(n) for n >= 1; zero beyond n_max and at n = 0.
    double K(std::size_t n) const { return (n == 0 || n > mass_.size()) ? 0.0 : mass_[n - 1]; }

    /// Masses K(1..n_max).
    std::span<const double> mass() const { return mass_; }
    std::span<const double> log_mass() const { return log_mass_; }

    /// K(n_max), ..., K(1): the layout consumed by the window dot products.
    std::span<const double> mass_reversed() const { return mass_rev_; }

    /// P(tau_1 > k) for k >= 0, computed from suffix sums.
    double tail(std::size_t k) const { return k >= tail_.size() ? 0.0 : tail_[k]; }

    /// Renormalized slowly varying factor, K(n) n^{1+alpha}. Only defined for
    /// phi-based laws.
    double phi_value(std::size_t n) const;

    /// Mass sum_{n > n_max} phi(n)/n^{1+alpha} lost by the truncation, relative
    /// to the untruncated total (integral bound). Zero for explicit laws.
    double truncated_tail_mass() const { return tail_mass_; }
    bool tail_warning() const { return tail_mass_ > kTailWarningLevel; }

    /// Key-value text block: alpha, phi_kind, phi parameters, n_max,
    /// declared-degenerate flag (and masses for explicit laws).
    std::string serialize() const;

    /// Stable short identifier derived from serialize().
    std::string id() const;

private:
    ReturnLaw() = default;
    void finalize(std::vector<double> unnormalized);

    double alpha_ = 0.0;
    PhiKind phi_ = ExplicitMass{};
    bool test_law_ = false;
    double norm_ = 1.0;
    double mu_ = 0.0;
    double tail_mass_ = 0.0;
    std::vector<double> mass_;
    std::vector<double> log_mass_;
    std::vector<double> mass_rev_;
    std::vector<double> tail_;
    std::vector<double> cdf_;

    friend std::size_t sample_gap(const ReturnLaw&, rng::CounterStream&);
};

ReturnLaw build_return_law(double alpha, PhiKind phi, std::size_t n_max);

struct RenewalMass {
    std::vector<double> u;  ///< u(0..N) = P(n in tau)
    std::string law_id;
};

/// u(0) = 1, u(n) = sum_{m=1}^{min(n, n_max)} K(m) u(n-m).
RenewalMass renewal_mass_function(const ReturnLaw& law, std::size_t N);

/// Renewal points of one trajectory restricted to [0, N], starting at 0.
std::vector<std::size_t> sample_renewal(const ReturnLaw& law, std::size_t N,
                                        rng::CounterStream& stream);

/// Draws a single gap from K by inverse-CDF lookup.
std::size_t sample_gap(const ReturnLaw& law, rng::CounterStream& stream);

struct ConditionedContacts {
    std::size_t N = 0;
    std::size_t q = 0;
    std::vector<double> u_q;  ///< u_q[n-1] = P(n in tau | tau_q = N), n = 1..N
    double p_tau_q = 0.0;     ///< P(tau_q = N)
};

/// Maximum number of doubles the q x N convolution table may hold.
inline constexpr std::size_t kDefaultTableBudget = std::size_t{1} << 24;

ConditionedContacts conditioned_contact_probabilities(const ReturnLaw& law, std::size_t q,
                                                      std::size_t N,
                                                      std::size_t table_budget = kDefaultTableBudget);

/// sum_n u_{N,q}(n)^2: the expected overlap of two independent copies
/// conditioned on tau_q = N.
double overlap_sum(const ReturnLaw& law, std::size_t q, std::size_t N,
                   std::size_t table_budget = kDefaultTableBudget);

/// sum_n K(n) e^{-s n}.
double laplace_transform(const ReturnLaw& law, double s);

/// How far u(n) strays from 1/mu on a probe range. C1 is the smallest constant
/// with 1/(C1 mu) <= u(n) <= C1/mu on that range.
struct RenewalDiagnostics {
    double u_min = 0.0;
    double u_max = 0.0;
    double C1 = 1.0;
    std::size_t probe = 0;
};

RenewalDiagnostics renewal_diagnostics(const ReturnLaw& law, std::size_t probe);

/// CSV with columns n,K,u for n = 0..N.
std::string export_mass_csv(const ReturnLaw& law, std::size_t N);

}  // namespace pinlab::renewal
