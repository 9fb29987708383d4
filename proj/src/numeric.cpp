#include "gergm/numeric.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>

#include "gergm/errors.hpp"

namespace gergm::numeric {

double log_sum_exp(std::span<const double> xs) {
    double m = -kInf;
    for (double x : xs) m = std::max(m, x);
    if (m == -kInf) return -kInf;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

void OnlineLogSumExp::add(double x) {
    ++count_;
    if (x <= max_) {
        const double e = std::exp(x - max_);
        s1_ += e;
        s2_ += e * e;
        return;
    }
    const double scale = std::exp(max_ - x);
    s1_ = s1_ * scale + 1.0;
    s2_ = s2_ * scale * scale + 1.0;
    max_ = x;
}

void OnlineLogSumExp::merge(const OnlineLogSumExp& other) {
    if (other.count_ == 0) return;
    if (count_ == 0) {
        *this = other;
        return;
    }
    const double m = std::max(max_, other.max_);
    const double a = std::exp(max_ - m);
    const double b = std::exp(other.max_ - m);
    s1_ = s1_ * a + other.s1_ * b;
    s2_ = s2_ * a * a + other.s2_ * b * b;
    max_ = m;
    count_ += other.count_;
}

double OnlineLogSumExp::log_sum() const {
    if (count_ == 0) return -kInf;
    return max_ + std::log(s1_);
}

double OnlineLogSumExp::log_mean() const {
    return log_sum() - std::log(static_cast<double>(count_));
}

double OnlineLogSumExp::rel_stderr_of_mean() const {
    if (count_ < 2) return kInf;
    const double n = static_cast<double>(count_);
    const double mean = s1_ / n;                       // units of exp(max)
    const double var = std::max(0.0, (s2_ / n - mean * mean) * n / (n - 1.0));
    return std::sqrt(var / n) / mean;
}

double OnlineLogSumExp::effective_sample_size() const {
    if (count_ == 0 || s2_ == 0.0) return 0.0;
    return s1_ * s1_ / s2_;
}

// ---------------------------------------------------------------------------

namespace {

GaussLegendreRule build_gauss_legendre(int n) {
    // Newton iteration on Legendre polynomials, cos initial guesses.
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z_old = z;
            z = z_old - p1 / pp;
            if (std::abs(z - z_old) < 1e-15) break;
        }
        rule.nodes[i] = -z;
        rule.nodes[n - 1 - i] = z;
        rule.weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    return rule;
}

}  // namespace

const GaussLegendreRule& gauss_legendre(int n) {
    static std::map<int, GaussLegendreRule> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_gauss_legendre(n)).first;
    return it->second;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 int panels, int n_nodes) {
    const auto& rule = gauss_legendre(n_nodes);
    const double h = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        const double mid = lo + 0.5 * h;
        double s = 0.0;
        for (int k = 0; k < n_nodes; ++k)
            s += rule.weights[k] * f(mid + 0.5 * h * rule.nodes[k]);
        total += 0.5 * h * s;
    }
    return total;
}

double log_integrate_exp(const std::function<double(double)>& log_f, double a,
                         double b, int panels, int n_nodes) {
    const auto& rule = gauss_legendre(n_nodes);
    const double h = (b - a) / panels;
    std::vector<double> terms;
    terms.reserve(static_cast<size_t>(panels) * n_nodes);
    for (int p = 0; p < panels; ++p) {
        const double mid = a + p * h + 0.5 * h;
        for (int k = 0; k < n_nodes; ++k) {
            const double x = mid + 0.5 * h * rule.nodes[k];
            terms.push_back(std::log(0.5 * h * rule.weights[k]) + log_f(x));
        }
    }
    return log_sum_exp(terms);
}

double brent_minimize(const std::function<double(double)>& f, double a,
                      double b, double tol, int max_iter) {
    // Brent's method: golden section with parabolic interpolation.
    const double gold = 0.3819660112501051;
    double x = a + gold * (b - a), w = x, v = x;
    double fx = f(x), fw = fx, fv = fx;
    double d = 0.0, e = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        const double xm = 0.5 * (a + b);
        const double tol1 = tol + 1e-14 * std::abs(x);
        const double tol2 = 2.0 * tol1;
        if (std::abs(x - xm) <= tol2 - 0.5 * (b - a)) break;
        bool parabolic = false;
        if (std::abs(e) > tol1) {
            const double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) p = -p;
            q = std::abs(q);
            const double e_old = e;
            e = d;
            if (std::abs(p) < std::abs(0.5 * q * e_old) && p > q * (a - x) &&
                p < q * (b - x)) {
                parabolic = true;
                d = p / q;
                const double u = x + d;
                if (u - a < tol2 || b - u < tol2) d = (xm > x) ? tol1 : -tol1;
            }
        }
        if (!parabolic) {
            e = (x >= xm) ? a - x : b - x;
            d = gold * e;
        }
        const double u =
            (std::abs(d) >= tol1) ? x + d : x + ((d > 0.0) ? tol1 : -tol1);
        const double fu = f(u);
        if (fu <= fx) {
            if (u >= x) a = x; else b = x;
            v = w; fv = fw;
            w = x; fw = fx;
            x = u; fx = fu;
        } else {
            if (u < x) a = u; else b = u;
            if (fu <= fw || w == x) {
                v = w; fv = fw;
                w = u; fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u; fv = fu;
            }
        }
    }
    return x;
}

double golden_section_minimize(const std::function<double(double)>& f,
                               double a, double b, double tol, int max_iter) {
    const double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

double bisect_root(const std::function<double(double)>& f, double a, double b,
                   double tol, int max_iter) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0))
        throw NumericError("bisect_root: endpoints do not bracket a root");
    for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fm > 0.0) == (fa > 0.0)) {
            a = m; fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

// ---------------------------------------------------------------------------
// Regularized incomplete gamma: series for x < a + 1, continued fraction
// otherwise.

namespace {

double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int it = 0; it < 500; ++it) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
    // Lentz continued fraction.
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw NumericError("gamma_p: invalid arguments");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw NumericError("gamma_q: invalid arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

ChiSquareResult chi_square_gof(std::span<const long long> observed,
                               std::span<const double> expected_probs,
                               long long total, int fitted_params) {
    if (observed.size() != expected_probs.size())
        throw NumericError("chi_square_gof: size mismatch");
    double stat = 0.0;
    int used = 0;
    for (size_t i = 0; i < observed.size(); ++i) {
        const double e = expected_probs[i] * static_cast<double>(total);
        if (e <= 0.0) {
            if (observed[i] != 0)
                throw NumericError("chi_square_gof: observation in zero-probability bin");
            continue;
        }
        const double diff = static_cast<double>(observed[i]) - e;
        stat += diff * diff / e;
        ++used;
    }
    const int dof = used - 1 - fitted_params;
    if (dof <= 0) throw NumericError("chi_square_gof: no degrees of freedom");
    return {stat, chi_square_sf(stat, dof), dof};
}

}  // namespace gergm::numeric
