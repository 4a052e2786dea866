#include "pinlab/disorder.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>

#include "pinlab/error.hpp"
#include "pinlab/rng.hpp"
#include "pinlab/text.hpp"

namespace pinlab::disorder {

namespace {

void check_t(double t) {
    if (!std::isfinite(t)) fail(ErrorKind::Domain, "log-MGF argument outside its domain");
}

const char* base_name(BaseKind k) { return k == BaseKind::Gaussian ? "gaussian" : "rademacher"; }

std::uint64_t to_le(std::uint64_t x) {
    if constexpr (std::endian::native == std::endian::big) {
        std::uint64_t r = 0;
        for (int i = 0; i < 8; ++i) r |= ((x >> (8 * i)) & 0xffULL) << (8 * (7 - i));
        return r;
    }
    return x;
}

}  // namespace

DisorderLaw DisorderLaw::tilted(BaseKind base, double delta) {
    require(std::isfinite(delta), ErrorKind::InvalidParameter, "tilt must be finite");
    return DisorderLaw(base, delta, true);
}

DisorderLaw DisorderLaw::tilted(const DisorderLaw& base, double delta) {
    require(!base.is_tilted(), ErrorKind::InvalidParameter, "tilting an already tilted law");
    return tilted(base.base(), delta);
}

DisorderLaw DisorderLaw::parse(const std::string& name) {
    const auto s = std::string(text::trim(name));
    if (s == "gaussian") return gaussian();
    if (s == "rademacher") return rademacher();
    if (s.rfind("tilted(", 0) == 0 && s.back() == ')') {
        const auto parts = text::split(std::string_view(s).substr(7, s.size() - 8), ',');
        if (parts.size() == 2) {
            const double d = text::parse_double(parts[1]);
            if (parts[0] == "gaussian") return tilted(BaseKind::Gaussian, d);
            if (parts[0] == "rademacher") return tilted(BaseKind::Rademacher, d);
        }
    }
    fail(ErrorKind::Format, "unknown disorder law '" + s + "'");
}

std::string DisorderLaw::name() const {
    if (!tilted_) return base_name(base_);
    return std::string("tilted(") + base_name(base_) + "," + text::format_double(delta_) + ")";
}

double DisorderLaw::mean() const {
    return tilted_ ? base_log_mgf_derivative(base_, -delta_) : 0.0;
}

bool DisorderLaw::in_domain(double t) const { return std::isfinite(t); }

double base_log_mgf(BaseKind kind, double t) {
    check_t(t);
    if (kind == BaseKind::Gaussian) return 0.5 * t * t;
    // log cosh t = |t| + log1p(e^{-2|t|}) - log 2
    const double a = std::abs(t);
    return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

double base_log_mgf_derivative(BaseKind kind, double t) {
    check_t(t);
    return kind == BaseKind::Gaussian ? t : std::tanh(t);
}

double log_mgf(const DisorderLaw& law, double t) {
    check_t(t);
    if (!law.is_tilted()) return base_log_mgf(law.base(), t);
    return base_log_mgf(law.base(), t - law.delta()) - base_log_mgf(law.base(), -law.delta());
}

double log_mgf_derivative(const DisorderLaw& law, double t) {
    check_t(t);
    return base_log_mgf_derivative(law.base(), law.is_tilted() ? t - law.delta() : t);
}

double annealed_shift_pinning(const DisorderLaw& law, double beta) {
    require(beta >= 0.0, ErrorKind::InvalidParameter, "beta must be nonnegative");
    return log_mgf(law, beta);
}

double annealed_shift_copolymer(const DisorderLaw& law, double lambda) {
    check_t(lambda);
    require(lambda > 0.0, ErrorKind::InvalidParameter, "lambda must be positive");
    return log_mgf(law, -2.0 * lambda) / (2.0 * lambda);
}

DisorderField DisorderField::negated() const {
    DisorderField f;
    f.law = law;
    f.seed = seed;
    f.replica_index = replica_index;
    f.values.assign(values.size(), 0.0);
    f.prefix.assign(prefix.size(), 0.0);
    for (std::size_t n = 1; n < values.size(); ++n) {
        f.prefix[n] = -prefix[n];
        f.values[n] = f.prefix[n] - f.prefix[n - 1];
    }
    return f;
}

DisorderField sample_field(const DisorderLaw& law, std::size_t N, std::uint64_t seed,
                           std::uint64_t replica_index) {
    require(N >= 1, ErrorKind::InvalidParameter, "field length must be at least 1");
    DisorderField f;
    f.law = law;
    f.seed = seed;
    f.replica_index = replica_index;
    f.values.assign(N + 1, 0.0);
    f.prefix.assign(N + 1, 0.0);

    const rng::Key key{seed, replica_index};
    const auto tag = static_cast<std::uint64_t>(rng::StreamTag::DisorderField);
    const double shift = law.is_tilted() ? -law.delta() : 0.0;
    double p_plus = 0.5;
    if (law.is_tilted()) {
        // e^{-d} / (e^{-d} + e^{d}) written as a logistic to stay finite for large |d|
        p_plus = 1.0 / (1.0 + std::exp(2.0 * law.delta()));
    }

    for (std::size_t n = 1; n <= N; ++n) {
        const auto b = rng::philox4x64({n, tag, 0, 0}, key);
        double w;
        if (law.base() == BaseKind::Gaussian) {
            const double u1 = rng::to_open_unit(b[0]);
            const double u2 = rng::to_open_unit(b[1]);
            w = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2) + shift;
        } else {
            w = rng::to_open_unit(b[0]) < p_plus ? 1.0 : -1.0;
        }
        f.prefix[n] = f.prefix[n - 1] + w;
        f.values[n] = f.prefix[n] - f.prefix[n - 1];
    }
    return f;
}

void dump_field(const DisorderField& field, std::ostream& os) {
    os << "pinlab-field 1\n";
    os << "law " << field.law.name() << "\n";
    os << "seed " << field.seed << "\n";
    os << "replica " << field.replica_index << "\n";
    os << "N " << field.N() << "\n";
    os << "rng " << rng::kAlgorithmId << "\n";
    os << "\n";
    for (std::size_t n = 1; n <= field.N(); ++n) {
        const std::uint64_t bits = to_le(std::bit_cast<std::uint64_t>(field.prefix[n]));
        char buf[8];
        std::memcpy(buf, &bits, 8);
        os.write(buf, 8);
    }
}

DisorderField load_field(std::istream& is) {
    std::string line;
    require(static_cast<bool>(std::getline(is, line)) && line == "pinlab-field 1", ErrorKind::Format,
            "not a field dump");
    DisorderField f;
    std::size_t N = 0;
    bool have_n = false;
    while (std::getline(is, line) && !line.empty()) {
        const auto sp = line.find(' ');
        require(sp != std::string::npos, ErrorKind::Format, "bad header line '" + line + "'");
        const std::string key = line.substr(0, sp), val = line.substr(sp + 1);
        if (key == "law") f.law = DisorderLaw::parse(val);
        else if (key == "seed") f.seed = text::parse_u64(val);
        else if (key == "replica") f.replica_index = text::parse_u64(val);
        else if (key == "N") { N = text::parse_u64(val); have_n = true; }
        else if (key == "rng") require(val == rng::kAlgorithmId, ErrorKind::Format, "unknown rng '" + val + "'");
    }
    require(have_n, ErrorKind::Format, "field header lacks N");
    f.values.assign(N + 1, 0.0);
    f.prefix.assign(N + 1, 0.0);
    for (std::size_t n = 1; n <= N; ++n) {
        char buf[8];
        require(static_cast<bool>(is.read(buf, 8)), ErrorKind::Format, "field dump truncated");
        std::uint64_t bits;
        std::memcpy(&bits, buf, 8);
        f.prefix[n] = std::bit_cast<double>(to_le(bits));
        f.values[n] = f.prefix[n] - f.prefix[n - 1];
    }
    return f;
}

}  // namespace pinlab::disorder
