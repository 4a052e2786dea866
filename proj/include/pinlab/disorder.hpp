#pragma once

// I.i.d. disorder laws with closed-form log-moment generating function, their
// exponential tilts, and reproducible sampled fields.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace pinlab::disorder {

enum class BaseKind { Gaussian, Rademacher };

/// Either a base law (mean 0, variance 1) or the tilt of one with density
/// e^{-delta w - Lambda(-delta)} relative to the base.
class DisorderLaw {
public:
    static DisorderLaw gaussian() { return DisorderLaw(BaseKind::Gaussian, 0.0, false); }
    static DisorderLaw rademacher() { return DisorderLaw(BaseKind::Rademacher, 0.0, false); }
    static DisorderLaw tilted(BaseKind base, double delta);
    static DisorderLaw tilted(const DisorderLaw& base, double delta);

    /// "gaussian", "rademacher", "tilted(gaussian,0.3)".
    static DisorderLaw parse(const std::string& name);

    BaseKind base() const { return base_; }
    DisorderLaw base_law() const { return DisorderLaw(base_, 0.0, false); }
    double delta() const { return delta_; }
    bool is_tilted() const { return tilted_; }
    std::string name() const;

    /// Analytic mean: Lambda_base'(-delta) for tilted laws, 0 otherwise.
    double mean() const;

    /// Lambda is finite on the whole real line for both base laws, hence for
    /// every tilt as well.
    bool in_domain(double t) const;

private:
    DisorderLaw(BaseKind b, double d, bool t) : base_(b), delta_(d), tilted_(t) {}
    BaseKind base_;
    double delta_;
    bool tilted_;
};

double base_log_mgf(BaseKind kind, double t);
double base_log_mgf_derivative(BaseKind kind, double t);

/// Lambda(t) = log E[e^{t w}].
double log_mgf(const DisorderLaw& law, double t);
double log_mgf_derivative(const DisorderLaw& law, double t);

/// h_a^pin(beta) = Lambda(beta).
double annealed_shift_pinning(const DisorderLaw& law, double beta);

/// h_a^cop(lambda) = Lambda(-2 lambda) / (2 lambda).
double annealed_shift_copolymer(const DisorderLaw& law, double lambda);

/// One disorder realization. Arrays are 1-based: values[n] = w_n and
/// prefix[n] = w_1 + ... + w_n for n = 1..N, with values[0] = prefix[0] = 0.
struct DisorderField {
    std::vector<double> values;
    std::vector<double> prefix;
    DisorderLaw law = DisorderLaw::gaussian();
    std::uint64_t seed = 0;
    std::uint64_t replica_index = 0;

    std::size_t N() const { return values.empty() ? 0 : values.size() - 1; }
    std::string law_id() const { return law.name(); }

    /// Same sites with w -> -w.
    DisorderField negated() const;
};

/// Site n uses Philox block {n, tag, 0, 0} under key {seed, replica_index},
/// so fields are independent of evaluation order and thread count.
DisorderField sample_field(const DisorderLaw& law, std::size_t N, std::uint64_t seed,
                           std::uint64_t replica_index);

/// Text header (law, seed, replica, N, rng) terminated by an empty line,
/// followed by prefix[1..N] as little-endian 64-bit floats. Values are
/// recovered as prefix differences, so a load reproduces the field exactly.
void dump_field(const DisorderField& field, std::ostream& os);
DisorderField load_field(std::istream& is);

}  // namespace pinlab::disorder
