#include "otail/classify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "otail/convolve.hpp"
#include "otail/grid.hpp"

namespace otail {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm,
               double fb, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
    const double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return simpson(f, a, m, fa, flm, fm, tol / 2, depth - 1) +
           simpson(f, m, b, fm, frm, fb, tol / 2, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
    if (!(b > a)) return 0.0;
    const double m = 0.5 * (a + b);
    return simpson(f, a, b, f(a), f(m), f(b), tol, 40);
}

}  // namespace

double TailRef::log_sf(double x) const { return model_ ? model_->log_survival(x) : grid_->log_sf_at(x); }
double TailRef::sf(double x) const { return std::exp(log_sf(x)); }

std::optional<double> TailRef::mean() const {
    if (model_) return model_->mean();
    return TailModel::tabulated(*grid_).mean();
}

bool TailRef::bounded_support() const {
    if (model_) return model_->bounded_support();
    return !std::isfinite(grid_->log_sf.back());
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::member: return "member";
        case Verdict::non_member: return "non_member";
        default: return "inconclusive";
    }
}
std::string to_string(Trend t) {
    switch (t) {
        case Trend::stabilizing: return "stabilizing";
        case Trend::diverging: return "diverging";
        default: return "oscillating";
    }
}
std::string to_string(Boundedness b) {
    switch (b) {
        case Boundedness::bounded: return "bounded";
        case Boundedness::unbounded: return "unbounded";
        default: return "inconclusive";
    }
}
std::string to_string(Comparability c) {
    switch (c) {
        case Comparability::vanishing: return "vanishing";
        case Comparability::bounded: return "bounded";
        case Comparability::diverging: return "diverging";
        default: return "inconclusive";
    }
}
std::string to_string(TailClass c) {
    switch (c) {
        case TailClass::OL: return "OL";
        case TailClass::L: return "L";
        case TailClass::Lgamma: return "L(gamma)";
        case TailClass::D: return "D";
        case TailClass::S: return "S";
        default: return "Sstar";
    }
}

TailClass tail_class_from_string(const std::string& s) {
    if (s == "OL" || s == "ol") return TailClass::OL;
    if (s == "L" || s == "l") return TailClass::L;
    if (s == "L(gamma)" || s == "Lgamma" || s == "lgamma") return TailClass::Lgamma;
    if (s == "D" || s == "d") return TailClass::D;
    if (s == "S" || s == "s") return TailClass::S;
    if (s == "Sstar" || s == "S*" || s == "sstar") return TailClass::Sstar;
    throw std::invalid_argument("unknown tail class '" + s + "'");
}

DyadicWindows DyadicWindows::over(double x_max) {
    DyadicWindows w;
    for (int i = 0; i < 3; ++i) {
        w.lo[i] = x_max / static_cast<double>(8 >> i);
        w.hi[i] = x_max / static_cast<double>(4 >> i);
    }
    return w;
}

int DyadicWindows::which(double x) const {
    for (int i = 0; i < 3; ++i) {
        if (x >= lo[i] && x <= hi[i]) return i;
    }
    return -1;
}

Boundedness judge_boundedness(const double sups[3]) {
    for (int i = 0; i < 3; ++i) {
        if (std::isinf(sups[i]) || std::isnan(sups[i])) return Boundedness::unbounded;
    }
    const double mx = std::max({sups[0], sups[1], sups[2]});
    const double mn = std::min({sups[0], sups[1], sups[2]});
    if (mn > 0 && mx / mn <= 1.05) return Boundedness::bounded;
    if (sups[1] <= sups[0] * (1 + 1e-9) && sups[2] <= sups[1] * (1 + 1e-9)) {
        return Boundedness::bounded;
    }
    if (sups[1] >= 1.25 * sups[0] && sups[2] >= 1.25 * sups[1]) return Boundedness::unbounded;
    return Boundedness::inconclusive;
}

bool decays_to(const double v[3], double limit, double tol_abs) {
    const double d0 = std::abs(v[0] - limit);
    const double d1 = std::abs(v[1] - limit);
    const double d2 = std::abs(v[2] - limit);
    if (d2 <= tol_abs) return true;
    return d2 <= 0.9 * d1 && d1 <= 0.9 * d0;
}

namespace {

RatioReport ratio_profile_impl(const TailRef& tail, double a, bool multiplicative, double x_max) {
    if (!(x_max > 0)) throw std::invalid_argument("ratio_profile: x_max must be > 0");
    RatioReport rr;
    rr.offset = a;
    rr.multiplicative = multiplicative;
    const std::vector<double> xs = make_hybrid_grid(x_max);
    const DyadicWindows win = DyadicWindows::over(x_max);
    for (int i = 0; i < 3; ++i) {
        rr.window_sup[i] = 0;
        rr.window_inf[i] = kInf;
        rr.window_log_mean[i] = 0;
    }
    long counts[3] = {0, 0, 0};
    rr.global_sup = 0;
    for (double x : xs) {
        const double shifted = multiplicative ? x * a : x - a;
        const double num = tail.log_sf(shifted);
        const double den = tail.log_sf(x);
        double r;
        if (std::isinf(den) && den < 0) {
            r = std::isinf(num) && num < 0 ? 1.0 : kInf;
            if (std::isinf(r)) rr.bounded_support_hit = true;
        } else {
            r = std::exp(num - den);
        }
        rr.series.emplace_back(x, r);
        rr.global_sup = std::max(rr.global_sup, r);
        const int w = win.which(x);
        if (w >= 0) {
            rr.window_sup[w] = std::max(rr.window_sup[w], r);
            rr.window_inf[w] = std::min(rr.window_inf[w], r);
            rr.window_log_mean[w] += std::isinf(r) ? 700.0 : std::log(std::max(r, 1e-300));
            ++counts[w];
        }
    }
    for (int i = 0; i < 3; ++i) {
        if (counts[i] > 0) rr.window_log_mean[i] /= static_cast<double>(counts[i]);
        if (!(rr.window_inf[i] < kInf)) rr.window_inf[i] = 0;
    }
    rr.windowed_sup = rr.window_sup[2];
    rr.verdict = judge_boundedness(rr.window_sup);
    if (rr.bounded_support_hit) rr.verdict = Boundedness::unbounded;
    switch (rr.verdict) {
        case Boundedness::bounded: rr.trend = Trend::stabilizing; break;
        case Boundedness::unbounded: rr.trend = Trend::diverging; break;
        default: rr.trend = Trend::oscillating; break;
    }
    return rr;
}

}  // namespace

RatioReport ratio_profile(const TailRef& tail, double a, double x_max) {
    if (a == 0) throw std::invalid_argument("ratio_profile: offset a must be nonzero");
    return ratio_profile_impl(tail, a, false, x_max);
}

RatioReport ratio_profile_multiplicative(const TailRef& tail, double factor, double x_max) {
    if (!(factor > 0) || !(factor < 1)) {
        throw std::invalid_argument("ratio_profile_multiplicative: factor must be in (0, 1)");
    }
    return ratio_profile_impl(tail, factor, true, x_max);
}

namespace {

ClassVerdict classify_ol(const TailRef& tail, const ClassifyOptions& opts) {
    ClassVerdict cv;
    cv.tail_class = TailClass::OL;
    cv.ratio = ratio_profile(tail, 1.0, opts.x_max);
    switch (cv.ratio.verdict) {
        case Boundedness::bounded: cv.verdict = Verdict::member; break;
        case Boundedness::unbounded: cv.verdict = Verdict::non_member; break;
        default: cv.verdict = Verdict::inconclusive; break;
    }
    return cv;
}

ClassVerdict classify_l(const TailRef& tail, const ClassifyOptions& opts) {
    ClassVerdict cv;
    cv.tail_class = TailClass::L;
    cv.ratio = ratio_profile(tail, 1.0, opts.x_max);
    if (cv.ratio.verdict == Boundedness::unbounded) {
        cv.verdict = Verdict::non_member;
        return cv;
    }
    const double* s = cv.ratio.window_sup;
    const double excess[3] = {s[0] - 1, s[1] - 1, s[2] - 1};
    if (excess[2] <= opts.eps_L || decays_to(excess, 0.0, opts.eps_L)) {
        cv.verdict = Verdict::member;
        return cv;
    }
    // ratio stabilized strictly above 1: long-tail limit cannot be 1
    const double mx = std::max({excess[0], excess[1], excess[2]});
    const double mn = std::min({excess[0], excess[1], excess[2]});
    if (mn > opts.eps_L && mx / mn <= 1.05) {
        cv.verdict = Verdict::non_member;
        return cv;
    }
    cv.verdict = Verdict::inconclusive;
    return cv;
}

ClassVerdict classify_lgamma(const TailRef& tail, const ClassifyOptions& opts) {
    ClassVerdict cv;
    cv.tail_class = TailClass::Lgamma;
    cv.ratio = ratio_profile(tail, 1.0, opts.x_max);
    if (cv.ratio.verdict == Boundedness::unbounded) {
        cv.verdict = Verdict::non_member;  // no finite gamma fits a diverging ratio
        return cv;
    }
    const double* g = cv.ratio.window_log_mean;
    const double g_est = g[2];
    const bool stable = std::abs(g[2] - g[1]) <= std::max(1e-9, 0.05 * std::abs(g[2])) &&
                        std::abs(g[1] - g[0]) <= std::max(1e-9, 0.05 * std::abs(g[1]));
    if (stable && g_est > 0.005) {
        cv.verdict = Verdict::member;
        cv.gamma_estimate = g_est;
        return cv;
    }
    if (decays_to(g, 0.0, 0.001)) {
        cv.verdict = Verdict::non_member;  // gamma would be 0: that is class L
        cv.gamma_estimate = 0.0;
        return cv;
    }
    cv.verdict = Verdict::inconclusive;
    return cv;
}

ClassVerdict classify_d(const TailRef& tail, const ClassifyOptions& opts) {
    ClassVerdict cv;
    cv.tail_class = TailClass::D;
    cv.ratio = ratio_profile_multiplicative(tail, 0.5, opts.x_max);
    switch (cv.ratio.verdict) {
        case Boundedness::bounded: cv.verdict = Verdict::member; break;
        case Boundedness::unbounded: cv.verdict = Verdict::non_member; break;
        default: cv.verdict = Verdict::inconclusive; break;
    }
    return cv;
}

ClassVerdict classify_s(const TailRef& tail, const ClassifyOptions& opts) {
    ClassVerdict cv;
    cv.tail_class = TailClass::S;
    if (!tail.model()) throw std::invalid_argument("classify S: needs a parametric model");
    const TailModel& m = *tail.model();
    // thinned abscissas with per-point relative quadrature budgets: the
    // diagnostic is a ratio, so certified grids buy nothing here
    const std::vector<double> all = make_hybrid_grid(opts.x_max);
    std::vector<double> xs;
    const std::size_t stride = std::max<std::size_t>(1, all.size() / 150);
    for (std::size_t i = 0; i < all.size(); i += stride) xs.push_back(all[i]);
    if (xs.back() != all.back()) xs.push_back(all.back());
    const DyadicWindows win = DyadicWindows::over(opts.x_max);
    double sums[3] = {0, 0, 0};
    long counts[3] = {0, 0, 0};
    bool diverged = false;
    for (const double x : xs) {
        const double den_sf = m.survival(x);
        double d;
        if (den_sf <= 0) {
            d = kInf;
            diverged = true;
        } else {
            const double node_tol = std::max(1e-13, 5e-4 * den_sf);
            const PointwiseConv pc = conv_tail_at(m, m, {x}, node_tol);
            d = pc.values[0] / den_sf;
        }
        cv.diag_series.emplace_back(x, d);
        const int w = win.which(x);
        if (w >= 0 && std::isfinite(d)) {
            sums[w] += d;
            ++counts[w];
        }
    }
    double means[3];
    for (int i = 0; i < 3; ++i) means[i] = counts[i] > 0 ? sums[i] / counts[i] : kInf;
    if (diverged) {
        cv.verdict = Verdict::non_member;
        cv.note = "self-convolution ratio undefined past bounded support";
        return cv;
    }
    if (decays_to(means, 2.0, 0.02)) {
        cv.verdict = Verdict::member;
    } else if (means[1] >= 1.25 * means[0] && means[2] >= 1.25 * means[1]) {
        cv.verdict = Verdict::non_member;  // ratio drifting away from 2
    } else {
        cv.verdict = Verdict::inconclusive;
    }
    return cv;
}

ClassVerdict classify_sstar(const TailRef& tail, const ClassifyOptions& opts) {
    ClassVerdict cv;
    cv.tail_class = TailClass::Sstar;
    const std::optional<double> mu = tail.mean();
    if (!mu) throw std::invalid_argument("classify Sstar: tail must carry a finite mean");
    const std::vector<double> xs = make_hybrid_grid(opts.x_max);
    const DyadicWindows win = DyadicWindows::over(opts.x_max);
    double sums[3] = {0, 0, 0};
    long counts[3] = {0, 0, 0};
    for (double x : xs) {
        const int w = win.which(x);
        if (w < 0) continue;
        auto integrand = [&](double y) { return tail.sf(x - y) * tail.sf(y); };
        const double fx = tail.sf(x);
        if (fx <= 0) {
            sums[w] += kInf;
            ++counts[w];
            continue;
        }
        const double integral = 2.0 * adaptive_simpson(integrand, 0.0, x / 2, 1e-12 + 1e-9 * fx * x);
        const double d = integral / (2.0 * (*mu) * fx);
        cv.diag_series.emplace_back(x, d);
        sums[w] += d;
        ++counts[w];
    }
    double means[3];
    for (int i = 0; i < 3; ++i) means[i] = counts[i] > 0 ? sums[i] / counts[i] : kInf;
    if (decays_to(means, 1.0, 0.02)) {
        cv.verdict = Verdict::member;
    } else if (means[1] >= 1.25 * means[0] && means[2] >= 1.25 * means[1]) {
        cv.verdict = Verdict::non_member;
    } else {
        cv.verdict = Verdict::inconclusive;
    }
    return cv;
}

}  // namespace

ClassVerdict classify(const TailRef& tail, TailClass cls, const ClassifyOptions& opts) {
    switch (cls) {
        case TailClass::OL: return classify_ol(tail, opts);
        case TailClass::L: return classify_l(tail, opts);
        case TailClass::Lgamma: return classify_lgamma(tail, opts);
        case TailClass::D: return classify_d(tail, opts);
        case TailClass::S: return classify_s(tail, opts);
        case TailClass::Sstar: return classify_sstar(tail, opts);
    }
    throw std::logic_error("classify: unreachable");
}

Comparability comparability(const TailRef& a, const TailRef& b, double x_max) {
    const bool ab = a.bounded_support(), bb = b.bounded_support();
    if (ab || bb) {
        auto upper = [](const TailRef& t) {
            if (t.model()) return t.model()->support_upper();
            const TailGrid* g = t.grid();
            for (std::size_t i = g->log_sf.size(); i-- > 0;) {
                if (std::isfinite(g->log_sf[i])) return i + 1 < g->xs.size() ? g->xs[i + 1] : g->xs[i];
            }
            return g->xs.front();
        };
        if (ab && !bb) return Comparability::vanishing;
        if (!ab && bb) return Comparability::diverging;
        const double ua = upper(a), ub = upper(b);
        if (ua < ub) return Comparability::vanishing;
        if (ua > ub) return Comparability::diverging;
        return Comparability::inconclusive;
    }
    const std::vector<double> xs = make_hybrid_grid(x_max);
    const DyadicWindows win = DyadicWindows::over(x_max);
    double sums[3] = {0, 0, 0};
    long counts[3] = {0, 0, 0};
    for (double x : xs) {
        const int w = win.which(x);
        if (w < 0) continue;
        sums[w] += a.log_sf(x) - b.log_sf(x);
        ++counts[w];
    }
    double m[3];
    for (int i = 0; i < 3; ++i) m[i] = counts[i] > 0 ? sums[i] / counts[i] : 0;
    const double d10 = m[1] - m[0], d21 = m[2] - m[1];
    if (d10 <= -0.5 && d21 <= -0.5 && m[2] <= -2.0) return Comparability::vanishing;
    if (d10 >= 0.5 && d21 >= 0.5 && m[2] >= 2.0) return Comparability::diverging;
    if (std::abs(d10) <= 0.2 && std::abs(d21) <= 0.2) return Comparability::bounded;
    return Comparability::inconclusive;
}

}
