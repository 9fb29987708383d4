#include "gergm/base_measure.hpp"

#include <cmath>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

#include "gergm/errors.hpp"
#include "gergm/numeric.hpp"

namespace gergm {

using numeric::kInf;
using numeric::log_add_exp;

namespace {

constexpr double kHalfLog2Pi = 0.9189385332046727417803297;

// Quadrature window for exp(theta*x - x^4): the integrand is below
// peak * 1e-20 outside [-L, L] by construction.
double quartic_window(double theta) {
    const double peak_x = std::cbrt(std::abs(theta) / 4.0);
    const double peak_log = std::abs(theta) * peak_x - std::pow(peak_x, 4.0);
    double L = std::max(3.0, peak_x + 2.0);
    while (std::abs(theta) * L - std::pow(L, 4.0) > peak_log - 50.0) L += 1.0;
    return L;
}

int quartic_panels(double L) { return std::max(16, static_cast<int>(std::ceil(4.0 * L))); }

// ln integral of exp(theta*x - x^4) over [a, b].
double quartic_log_integral(double theta, double a, double b) {
    return numeric::log_integrate_exp(
        [theta](double x) { return theta * x - std::pow(x, 4.0); }, a, b,
        quartic_panels(b - a), 32);
}

double log_normal_cdf(double x) {
    const double c = numeric::normal_cdf(x);
    return c > 0.0 ? std::log(c) : -kInf;
}

// Poisson upper tail P(X >= k) via the regularized incomplete gamma.
double poisson_tail(double rate, long long k) {
    if (k <= 0) return 1.0;
    return numeric::gamma_p(static_cast<double>(k), rate);
}

}  // namespace

double quartic_c4() {
    // 1 / (2 Gamma(5/4)), cross-checked by quadrature in the tests.
    static const double c4 = 1.0 / (2.0 * std::tgamma(1.25));
    return c4;
}

BaseMeasure::BaseMeasure(MeasureKind k, double p1, double p2)
    : kind_(k), p1_(p1), p2_(p2) {}

BaseMeasure BaseMeasure::gaussian(double mean, double variance) {
    if (variance <= 0.0) throw ConfigError("gaussian base: variance must be > 0");
    return {MeasureKind::gaussian, mean, variance};
}
BaseMeasure BaseMeasure::quartic() { return {MeasureKind::quartic, 0.0, 0.0}; }
BaseMeasure BaseMeasure::bernoulli(double p) {
    if (p <= 0.0 || p >= 1.0) throw ConfigError("bernoulli base: p must be in (0,1)");
    return {MeasureKind::bernoulli, p, 0.0};
}
BaseMeasure BaseMeasure::poisson(double rate) {
    if (rate <= 0.0) throw ConfigError("poisson base: rate must be > 0");
    return {MeasureKind::poisson, rate, 0.0};
}

double BaseMeasure::mean() const {
    switch (kind_) {
        case MeasureKind::gaussian: return p1_;
        case MeasureKind::quartic: return 0.0;
        case MeasureKind::bernoulli: return p1_;
        case MeasureKind::poisson: return p1_;
    }
    return 0.0;
}

double BaseMeasure::variance() const {
    switch (kind_) {
        case MeasureKind::gaussian: return p2_;
        case MeasureKind::quartic: {
            // E[x^2] of C4 exp(-x^4): Gamma(3/4) / Gamma(1/4).
            static const double v = std::tgamma(0.75) / std::tgamma(0.25);
            return v;
        }
        case MeasureKind::bernoulli: return p1_ * (1.0 - p1_);
        case MeasureKind::poisson: return p1_;
    }
    return 0.0;
}

SupportHull BaseMeasure::support() const {
    switch (kind_) {
        case MeasureKind::gaussian: return {-kInf, kInf, false};
        case MeasureKind::quartic: return {-kInf, kInf, false};
        case MeasureKind::bernoulli: return {0.0, 1.0, true};
        case MeasureKind::poisson: return {0.0, kInf, true};
    }
    return {-kInf, kInf, false};
}

double BaseMeasure::normalizer() const {
    return kind_ == MeasureKind::quartic ? quartic_c4() : 1.0;
}

std::string BaseMeasure::describe() const {
    switch (kind_) {
        case MeasureKind::gaussian:
            return "gaussian(mean=" + std::to_string(p1_) + ",var=" + std::to_string(p2_) + ")";
        case MeasureKind::quartic: return "quartic";
        case MeasureKind::bernoulli: return "bernoulli(p=" + std::to_string(p1_) + ")";
        case MeasureKind::poisson: return "poisson(rate=" + std::to_string(p1_) + ")";
    }
    return "?";
}

double BaseMeasure::log_mgf(double theta, std::optional<double> truncation) const {
    if (truncation && *truncation <= 0.0)
        throw ConfigError("log_mgf: truncation level must be > 0");
    if (!truncation) {
        switch (kind_) {
            case MeasureKind::gaussian:
                return theta * p1_ + 0.5 * p2_ * theta * theta;
            case MeasureKind::bernoulli:
                // ln((1-p) + p e^theta)
                return log_add_exp(std::log1p(-p1_), std::log(p1_) + theta);
            case MeasureKind::poisson:
                return p1_ * std::expm1(theta);
            case MeasureKind::quartic: {
                const double L = quartic_window(theta);
                const double v = quartic_log_integral(theta, -L, L) + std::log(quartic_c4());
                if (!std::isfinite(v))
                    throw NumericError("log_mgf: quartic quadrature failed at theta=" +
                                       std::to_string(theta));
                return v;
            }
        }
    }
    const double l = *truncation;
    switch (kind_) {
        case MeasureKind::gaussian: {
            const double mu = p1_, sd = std::sqrt(p2_);
            // exact tails + quadrature middle, assembled in log space
            const double lo_tail = log_normal_cdf((-l - mu) / sd) - theta * l;
            const double hi_tail = log_normal_cdf(-(l - mu) / sd) + theta * l;
            const double mid = numeric::log_integrate_exp(
                [&](double x) {
                    const double z = (x - mu) / sd;
                    return theta * x - 0.5 * z * z - kHalfLog2Pi - std::log(sd);
                },
                -l, l, std::max(16, static_cast<int>(std::ceil(l * 2))), 32);
            return log_add_exp(log_add_exp(lo_tail, hi_tail), mid);
        }
        case MeasureKind::quartic: {
            const double lo_tail =
                quartic_log_integral(0.0, -quartic_window(0.0), -l) - theta * l;
            const double hi_tail =
                quartic_log_integral(0.0, l, quartic_window(0.0)) + theta * l;
            const double mid = quartic_log_integral(theta, -l, l);
            return log_add_exp(log_add_exp(lo_tail, hi_tail), mid) + std::log(quartic_c4());
        }
        case MeasureKind::bernoulli: {
            const double v = std::min(1.0, l);
            return log_add_exp(std::log1p(-p1_), std::log(p1_) + theta * v);
        }
        case MeasureKind::poisson: {
            // sum over k <= m exactly, analytic tail mass at value l above
            const long long m = static_cast<long long>(std::ceil(l));
            double acc = -kInf;
            double log_pmf = -p1_;  // k = 0
            for (long long k = 0; k < m; ++k) {
                acc = log_add_exp(acc, theta * std::min(static_cast<double>(k), l) + log_pmf);
                log_pmf += std::log(p1_) - std::log(static_cast<double>(k + 1));
            }
            acc = log_add_exp(acc, theta * l + std::log(poisson_tail(p1_, m)));
            return acc;
        }
    }
    throw NumericError("log_mgf: unreachable");
}

BaseMeasure::TiltedMoments BaseMeasure::tilted_moments(
    double theta, std::optional<double> truncation) const {
    if (!truncation) {
        switch (kind_) {
            case MeasureKind::gaussian:
                return {p1_ + p2_ * theta, p2_};
            case MeasureKind::bernoulli: {
                const double m = 1.0 / (1.0 + std::exp(-(theta + std::log(p1_ / (1.0 - p1_)))));
                return {m, m * (1.0 - m)};
            }
            case MeasureKind::poisson: {
                const double m = p1_ * std::exp(theta);
                return {m, m};
            }
            case MeasureKind::quartic: {
                const double L = quartic_window(theta);
                const double peak_x = std::cbrt(theta / 4.0);
                const double shift = theta * peak_x - std::pow(peak_x, 4.0);
                auto f = [&](double x) { return std::exp(theta * x - std::pow(x, 4.0) - shift); };
                const int panels = quartic_panels(2 * L);
                const double z0 = numeric::integrate(f, -L, L, panels);
                const double z1 = numeric::integrate([&](double x) { return x * f(x); }, -L, L, panels);
                const double z2 = numeric::integrate([&](double x) { return x * x * f(x); }, -L, L, panels);
                if (z0 <= 0.0 || !std::isfinite(z0))
                    throw NumericError("tilted_moments: quartic quadrature failed");
                const double mean = z1 / z0;
                return {mean, std::max(z2 / z0 - mean * mean, 1e-300)};
            }
        }
    }
    // Truncated variants: central differences of ln M_l are accurate enough
    // for Newton steps; the convergence test is on the derivative itself.
    const double h = 1e-5 * std::max(1.0, std::abs(theta));
    const double f0 = log_mgf(theta, truncation);
    const double fp = log_mgf(theta + h, truncation);
    const double fm = log_mgf(theta - h, truncation);
    const double mean = (fp - fm) / (2.0 * h);
    const double var = std::max((fp + fm - 2.0 * f0) / (h * h), 1e-12);
    return {mean, var};
}

double BaseMeasure::log_density(double x) const {
    switch (kind_) {
        case MeasureKind::gaussian: {
            const double z = (x - p1_) * (x - p1_) / p2_;
            return -0.5 * z - kHalfLog2Pi - 0.5 * std::log(p2_);
        }
        case MeasureKind::quartic:
            return std::log(quartic_c4()) - std::pow(x, 4.0);
        case MeasureKind::bernoulli:
            if (x == 1.0) return std::log(p1_);
            if (x == 0.0) return std::log1p(-p1_);
            return -kInf;
        case MeasureKind::poisson: {
            if (x < 0.0 || x != std::floor(x)) return -kInf;
            return x * std::log(p1_) - p1_ - std::lgamma(x + 1.0);
        }
    }
    return -kInf;
}

double BaseMeasure::sample_one(Rng& rng) const {
    switch (kind_) {
        case MeasureKind::gaussian:
            return rng.normal(p1_, std::sqrt(p2_));
        case MeasureKind::quartic: {
            // Rejection against N(0, 1/2): accept prob exp(-(y^2 - 1/2)^2),
            // overall acceptance ~0.80.
            for (int attempt = 0; attempt < 10000; ++attempt) {
                const double y = rng.normal() * M_SQRT1_2;
                const double t = y * y - 0.5;
                if (rng.uniform() < std::exp(-t * t)) return y;
            }
            throw NumericError("quartic sampler: rejection retry cap exceeded");
        }
        case MeasureKind::bernoulli:
            return rng.bernoulli(p1_) ? 1.0 : 0.0;
        case MeasureKind::poisson:
            return static_cast<double>(rng.poisson(p1_));
    }
    return 0.0;
}

std::vector<double> BaseMeasure::sample(std::uint64_t seed, long long count) const {
    if (count < 1) throw ConfigError("sample: count must be >= 1");
    Rng rng(seed);
    std::vector<double> out(static_cast<size_t>(count));
    for (auto& v : out) v = sample_one(rng);
    return out;
}

// ---------------------------------------------------------------------------
// RateFunction

struct RateFunction::Cache {
    mutable std::shared_mutex mu;
    mutable std::unordered_map<long long, double> nodes;
};

namespace {

bool has_closed_form(MeasureKind k) {
    return k == MeasureKind::gaussian || k == MeasureKind::bernoulli ||
           k == MeasureKind::poisson;
}

}  // namespace

RateFunction::RateFunction(BaseMeasure measure, std::optional<RateMode> mode,
                           std::optional<double> truncation_level,
                           double grid_step)
    : measure_(std::move(measure)),
      mode_(RateMode::numeric_legendre),
      truncation_(truncation_level),
      grid_step_(grid_step),
      hull_{0, 0, false},
      cache_(std::make_unique<Cache>()) {
    if (truncation_ && *truncation_ <= 0.0)
        throw ConfigError("RateFunction: truncation level must be > 0");
    if (mode) {
        mode_ = *mode;
        if (mode_ == RateMode::analytic &&
            (!has_closed_form(measure_.kind()) || truncation_))
            throw ConfigError("RateFunction: no closed form for " + measure_.describe() +
                              (truncation_ ? " (truncated)" : ""));
    } else if (has_closed_form(measure_.kind()) && !truncation_) {
        mode_ = RateMode::analytic;
    }
    SupportHull h = measure_.support();
    if (truncation_) {
        h.lo = std::max(h.lo, -*truncation_);
        h.hi = std::min(h.hi, *truncation_);
    }
    hull_ = h;
}

RateFunction::RateFunction(const RateFunction& other)
    : measure_(other.measure_),
      mode_(other.mode_),
      truncation_(other.truncation_),
      grid_step_(other.grid_step_),
      hull_(other.hull_),
      cache_(std::make_unique<Cache>()) {}

RateFunction::~RateFunction() = default;

double RateFunction::analytic_value(double x) const {
    switch (measure_.kind()) {
        case MeasureKind::gaussian: {
            const double d = x - measure_.param1();
            return d * d / (2.0 * measure_.param2());
        }
        case MeasureKind::bernoulli: {
            const double p = measure_.param1();
            if (x < 0.0 || x > 1.0) return kInf;
            if (x == 0.0) return -std::log1p(-p);
            if (x == 1.0) return -std::log(p);
            return x * std::log(x / p) + (1.0 - x) * std::log((1.0 - x) / (1.0 - p));
        }
        case MeasureKind::poisson: {
            const double r = measure_.param1();
            if (x < 0.0) return kInf;
            if (x == 0.0) return r;
            return x * std::log(x / r) - x + r;
        }
        default:
            throw NumericError("analytic rate: unsupported kind");
    }
}

double RateFunction::boundary_value(double x) const {
    // h at a finite hull endpoint equals -ln(mass at that endpoint) of the
    // truncated measure; infinite if the endpoint carries no atom.
    const auto& m = measure_;
    if (truncation_) {
        const double l = *truncation_;
        if (x == hull_.hi || x == hull_.lo) {
            const bool upper = (x == hull_.hi);
            switch (m.kind()) {
                case MeasureKind::gaussian: {
                    const double mu = m.param1(), sd = std::sqrt(m.param2());
                    const double z = upper ? (l - mu) / sd : (-l - mu) / sd;
                    return -log_normal_cdf(upper ? -z : z);
                }
                case MeasureKind::quartic: {
                    const double L = quartic_window(0.0);
                    const double tail = upper ? quartic_log_integral(0.0, l, L)
                                              : quartic_log_integral(0.0, -L, -l);
                    return -(tail + std::log(quartic_c4()));
                }
                case MeasureKind::bernoulli: {
                    const double p = m.param1();
                    if (upper) return l >= 1.0 ? -std::log(p) : -std::log(p);
                    return -std::log1p(-p);
                }
                case MeasureKind::poisson: {
                    if (!upper) return m.param1();  // atom at 0
                    return -std::log(poisson_tail(m.param1(), static_cast<long long>(std::ceil(l))));
                }
            }
        }
        return kInf;
    }
    // Untruncated bounded-support kinds.
    if (m.kind() == MeasureKind::bernoulli) return analytic_value(x);
    if (m.kind() == MeasureKind::poisson && x == 0.0) return m.param1();
    return kInf;
}

double RateFunction::legendre_value(double x) const {
    // Bracketed Newton on the stationarity condition x = M'(theta)/M(theta),
    // golden-section fallback; tolerance and iteration cap per the module
    // contract.
    const double scale = std::max(1.0, std::abs(x));
    const double tol = 1e-10 * scale;
    auto mean_at = [&](double t) { return measure_.tilted_moments(t, truncation_).mean; };

    double lo = 0.0, hi = 0.0;
    const double m0 = mean_at(0.0);
    if (std::abs(x - m0) < tol) return -measure_.log_mgf(0.0, truncation_);
    if (x > m0) {
        hi = 1.0;
        while (mean_at(hi) < x) {
            lo = hi;
            hi *= 2.0;
            if (hi > 1e6)
                throw UnboundedRateError("rate: no bracket for x=" + std::to_string(x) +
                                         " up to |theta|=1e6");
        }
    } else {
        lo = -1.0;
        while (mean_at(lo) > x) {
            hi = lo;
            lo *= 2.0;
            if (lo < -1e6)
                throw UnboundedRateError("rate: no bracket for x=" + std::to_string(x) +
                                         " up to |theta|=1e6");
        }
    }

    double theta = 0.5 * (lo + hi);
    bool converged = false;
    for (int it = 0; it < 200; ++it) {
        const auto mom = measure_.tilted_moments(theta, truncation_);
        const double resid = x - mom.mean;
        if (std::abs(resid) < tol) {
            converged = true;
            break;
        }
        if (resid > 0.0) lo = theta; else hi = theta;
        double next = theta + resid / mom.var;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        theta = next;
    }
    if (!converged) {
        // Golden-section on the concave objective as a last resort.
        theta = numeric::golden_section_minimize(
            [&](double t) { return -(t * x - measure_.log_mgf(t, truncation_)); }, lo, hi,
            1e-12);
    }
    return theta * x - measure_.log_mgf(theta, truncation_);
}

double RateFunction::eval_exact(double x) const {
    if (!hull_.contains(x)) return kInf;
    if (mode_ == RateMode::analytic) return analytic_value(x);
    if (has_closed_form(measure_.kind()) && !truncation_) {
        // numeric mode on a closed-form measure still solves numerically;
        // boundary atoms are the only special case.
        if (x == hull_.lo || x == hull_.hi) return boundary_value(x);
        return legendre_value(x);
    }
    if (x == hull_.lo || x == hull_.hi) return boundary_value(x);
    return legendre_value(x);
}

double RateFunction::grid_node_value(long long idx) const {
    {
        std::shared_lock lock(cache_->mu);
        auto it = cache_->nodes.find(idx);
        if (it != cache_->nodes.end()) return it->second;
    }
    const double v = eval_exact(static_cast<double>(idx) * grid_step_);
    std::unique_lock lock(cache_->mu);
    cache_->nodes.emplace(idx, v);
    return v;
}

double RateFunction::interpolated(double x) const {
    const double t = x / grid_step_;
    const long long k = static_cast<long long>(std::floor(t));
    const double frac = t - static_cast<double>(k);
    const double y0 = grid_node_value(k - 1);
    const double y1 = grid_node_value(k);
    const double y2 = grid_node_value(k + 1);
    const double y3 = grid_node_value(k + 2);
    if (!std::isfinite(y0) || !std::isfinite(y1) || !std::isfinite(y2) ||
        !std::isfinite(y3))
        return eval_exact(x);  // too close to the hull boundary to interpolate
    // Catmull-Rom cubic through the four surrounding nodes.
    const double a0 = -0.5 * y0 + 1.5 * y1 - 1.5 * y2 + 0.5 * y3;
    const double a1 = y0 - 2.5 * y1 + 2.0 * y2 - 0.5 * y3;
    const double a2 = -0.5 * y0 + 0.5 * y2;
    return ((a0 * frac + a1) * frac + a2) * frac + y1;
}

double RateFunction::operator()(double x) const {
    if (!hull_.contains(x)) return kInf;
    if (mode_ == RateMode::analytic) return analytic_value(x);
    return interpolated(x);
}

double RateFunction::derivative(double x) const {
    if (mode_ == RateMode::analytic) {
        switch (measure_.kind()) {
            case MeasureKind::gaussian:
                return (x - measure_.param1()) / measure_.param2();
            case MeasureKind::bernoulli: {
                const double p = measure_.param1();
                return std::log(x / p) - std::log((1.0 - x) / (1.0 - p));
            }
            case MeasureKind::poisson:
                return std::log(x / measure_.param1());
            default: break;
        }
    }
    const double h = 1e-6 * std::max(1.0, std::abs(x));
    return ((*this)(x + h) - (*this)(x - h)) / (2.0 * h);
}

double RateFunction::kernel_rate(const Eigen::MatrixXd& cell_values) const {
    const auto n = cell_values.rows();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const double h = (*this)(cell_values(i, j));
            if (h == kInf) return kInf;
            sum += h;
        }
    return 0.5 * sum / static_cast<double>(n * n);
}

double log_mgf(const BaseMeasure& m, double theta, std::optional<double> truncation) {
    return m.log_mgf(theta, truncation);
}
double rate(const RateFunction& h, double x) { return h(x); }
double kernel_rate(const RateFunction& h, double u) { return h.kernel_rate(u); }

}  // namespace gergm
