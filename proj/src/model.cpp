#include "otail/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace otail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kSqrtPi = 1.7724538509055160273;

// maximize a unimodal function on [lo, hi] by golden-section
template <typename F>
double golden_max(F f, double lo, double hi) {
    constexpr double invphi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 120 && (b - a) > 1e-13 * (1.0 + std::abs(a)); ++it) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    return std::max(f(0.5 * (a + b)), std::max(fc, fd));
}

double table_sum(const std::vector<std::pair<double, double>>& pts) {
    double s = 0;
    for (const auto& [v, p] : pts) s += p;
    return s;
}

}  // namespace

TailModel::TailModel(Family family) : family_(std::move(family)) {
    validate();
    compute_mean();
}

TailModel TailModel::pareto(double scale, double shape) { return TailModel(Pareto{scale, shape}); }
TailModel TailModel::exponential(double rate) { return TailModel(Exponential{rate}); }
TailModel TailModel::weibull_root() { return TailModel(WeibullRoot{}); }
TailModel TailModel::uniform(double lo, double hi) { return TailModel(Uniform{lo, hi}); }
TailModel TailModel::point_mass(double location) { return TailModel(PointMass{location}); }
TailModel TailModel::finite_table(std::vector<std::pair<double, double>> points) {
    return TailModel(FiniteTable{std::move(points)});
}
TailModel TailModel::plateau_exponential(double level) {
    return TailModel(PlateauExponential{level});
}
TailModel TailModel::tabulated(TailGrid grid, std::optional<double> mean) {
    return TailModel(Tabulated{std::move(grid), mean});
}
TailModel TailModel::gauss_tail() { return TailModel(GaussTail{}); }

void TailModel::validate() const {
    std::visit(
        [](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Pareto>) {
                if (!(f.scale > 0) || !(f.shape > 0)) {
                    throw std::invalid_argument("pareto: scale and shape must be > 0");
                }
            } else if constexpr (std::is_same_v<T, Exponential>) {
                if (!(f.rate > 0)) throw std::invalid_argument("exponential: rate must be > 0");
            } else if constexpr (std::is_same_v<T, Uniform>) {
                if (!(f.lo >= 0) || !(f.lo < f.hi)) {
                    throw std::invalid_argument("uniform: need 0 <= lo < hi");
                }
            } else if constexpr (std::is_same_v<T, PointMass>) {
                if (!(f.location >= 0)) throw std::invalid_argument("point_mass: location must be >= 0");
            } else if constexpr (std::is_same_v<T, FiniteTable>) {
                if (f.points.empty()) throw std::invalid_argument("finite_table: empty");
                double prev = -1;
                for (const auto& [v, p] : f.points) {
                    if (!(v >= 0)) throw std::invalid_argument("finite_table: negative value");
                    if (!(p > 0)) throw std::invalid_argument("finite_table: probs must be > 0");
                    if (!(v > prev)) throw std::invalid_argument("finite_table: values must be strictly increasing");
                    prev = v;
                }
                if (std::abs(table_sum(f.points) - 1.0) > 1e-12) {
                    throw std::invalid_argument("finite_table: probs must sum to 1");
                }
            } else if constexpr (std::is_same_v<T, PlateauExponential>) {
                if (!(f.level >= 2)) throw std::invalid_argument("plateau_exponential: level must be >= 2");
            } else if constexpr (std::is_same_v<T, Tabulated>) {
                f.grid.validate();
            }
        },
        family_);
}

void TailModel::compute_mean() {
    mean_ = std::visit(
        [](const auto& f) -> std::optional<double> {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Pareto>) {
                if (f.shape > 1) return f.scale / (f.shape - 1);
                return std::nullopt;
            } else if constexpr (std::is_same_v<T, Exponential>) {
                return 1.0 / f.rate;
            } else if constexpr (std::is_same_v<T, WeibullRoot>) {
                return 2.0;
            } else if constexpr (std::is_same_v<T, Uniform>) {
                return 0.5 * (f.lo + f.hi);
            } else if constexpr (std::is_same_v<T, PointMass>) {
                return f.location;
            } else if constexpr (std::is_same_v<T, FiniteTable>) {
                double m = 0;
                for (const auto& [v, p] : f.points) m += v * p;
                return m;
            } else if constexpr (std::is_same_v<T, PlateauExponential>) {
                return 1.0 + 1.0 / f.level;
            } else if constexpr (std::is_same_v<T, Tabulated>) {
                if (f.mean) return f.mean;
                // integral of the survival curve, piece by piece
                const TailGrid& g = f.grid;
                double acc = 0;
                for (std::size_t i = 0; i + 1 < g.xs.size(); ++i) {
                    const double la = g.log_sf[i], lb = g.log_sf[i + 1];
                    const double dx = g.xs[i + 1] - g.xs[i];
                    if (!std::isfinite(la)) break;
                    if (!std::isfinite(lb)) {
                        acc += std::exp(la) * dx;  // held value, zero past the node
                        continue;
                    }
                    const double b = (lb - la) / dx;
                    acc += std::abs(b) < 1e-14 ? std::exp(la) * dx
                                               : (std::exp(lb) - std::exp(la)) / b;
                }
                const double slope = g.tail_slope();
                const double last = g.log_sf.back();
                if (std::isfinite(last) && std::exp(last) > 0) {
                    if (!(slope < 0)) return std::nullopt;
                    acc += std::exp(last) / (-slope);
                }
                return acc;
            } else {  // GaussTail
                return 0.5 * kSqrtPi;
            }
        },
        family_);
}

std::string TailModel::family_name() const {
    return std::visit(
        [](const auto& f) -> std::string {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Pareto>) return "pareto";
            else if constexpr (std::is_same_v<T, Exponential>) return "exponential";
            else if constexpr (std::is_same_v<T, WeibullRoot>) return "weibull_root";
            else if constexpr (std::is_same_v<T, Uniform>) return "uniform";
            else if constexpr (std::is_same_v<T, PointMass>) return "point_mass";
            else if constexpr (std::is_same_v<T, FiniteTable>) return "finite_table";
            else if constexpr (std::is_same_v<T, PlateauExponential>) return "plateau_exponential";
            else if constexpr (std::is_same_v<T, Tabulated>) return "tabulated";
            else return "gauss_tail";
        },
        family_);
}

double TailModel::log_survival(double x) const {
    if (x < 0) return 0.0;
    return std::visit(
        [x](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Pareto>) {
                return -f.shape * std::log1p(x / f.scale);
            } else if constexpr (std::is_same_v<T, Exponential>) {
                return -f.rate * x;
            } else if constexpr (std::is_same_v<T, WeibullRoot>) {
                return -std::sqrt(x);
            } else if constexpr (std::is_same_v<T, Uniform>) {
                if (x < f.lo) return 0.0;
                if (x >= f.hi) return kNegInf;
                return std::log((f.hi - x) / (f.hi - f.lo));
            } else if constexpr (std::is_same_v<T, PointMass>) {
                return x < f.location ? 0.0 : kNegInf;
            } else if constexpr (std::is_same_v<T, FiniteTable>) {
                double s = 0;
                for (auto it = f.points.rbegin(); it != f.points.rend(); ++it) {
                    if (it->first > x) s += it->second;
                    else break;
                }
                return s > 0 ? std::log(s) : kNegInf;
            } else if constexpr (std::is_same_v<T, PlateauExponential>) {
                const double lk = std::log(f.level);
                return x < f.level ? -lk : -lk - (x - f.level);
            } else if constexpr (std::is_same_v<T, Tabulated>) {
                return f.grid.log_sf_at(x);
            } else {  // GaussTail
                return -x * x;
            }
        },
        family_);
}

double TailModel::survival(double x) const { return std::exp(log_survival(x)); }

double TailModel::survival_left(double x) const {
    return std::visit(
        [this, x](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, PointMass>) {
                return x <= f.location ? 1.0 : 0.0;
            } else if constexpr (std::is_same_v<T, FiniteTable>) {
                double s = 0;
                for (auto it = f.points.rbegin(); it != f.points.rend(); ++it) {
                    if (it->first >= x) s += it->second;
                    else break;
                }
                return s;
            } else if constexpr (std::is_same_v<T, PlateauExponential>) {
                if (x <= 0) return 1.0;
                return survival(x);
            } else if constexpr (std::is_same_v<T, Tabulated>) {
                if (x <= f.grid.xs.front()) return x < f.grid.xs.front() ? 1.0 : 1.0;
                return survival(x);
            } else {
                (void)f;
                return x <= 0 ? 1.0 : survival(x);
            }
        },
        family_);
}

double TailModel::quantile(double u) const {
    if (!(u > 0) || !(u <= 1)) throw std::invalid_argument("quantile: u must be in (0, 1]");
    return std::visit(
        [u](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Pareto>) {
                return f.scale * std::expm1(-std::log(u) / f.shape);
            } else if constexpr (std::is_same_v<T, Exponential>) {
                return -std::log(u) / f.rate;
            } else if constexpr (std::is_same_v<T, WeibullRoot>) {
                const double l = std::log(u);
                return l * l;
            } else if constexpr (std::is_same_v<T, Uniform>) {
                return f.hi - u * (f.hi - f.lo);
            } else if constexpr (std::is_same_v<T, PointMass>) {
                return f.location;
            } else if constexpr (std::is_same_v<T, FiniteTable>) {
                double s = 1.0;
                for (const auto& [v, p] : f.points) {
                    s -= p;  // survival just past v
                    if (s <= u + 1e-15) return v;
                }
                return f.points.back().first;
            } else if constexpr (std::is_same_v<T, PlateauExponential>) {
                if (u >= 1.0 / f.level) return 0.0;
                return f.level - std::log(f.level * u);
            } else if constexpr (std::is_same_v<T, Tabulated>) {
                const TailGrid& g = f.grid;
                const double lu = std::log(u);
                if (lu >= g.log_sf.front()) return g.xs.front();
                // first node with log_sf <= lu
                std::size_t lo = 0, hi = g.xs.size() - 1;
                if (g.log_sf.back() > lu) {
                    const double slope = g.tail_slope();
                    if (!(slope < 0)) return g.xs.back();
                    return g.xs.back() + (lu - g.log_sf.back()) / slope;
                }
                while (lo + 1 < hi) {
                    const std::size_t mid = (lo + hi) / 2;
                    if (g.log_sf[mid] <= lu) hi = mid;
                    else lo = mid;
                }
                const double la = g.log_sf[lo], lb = g.log_sf[hi];
                if (!std::isfinite(lb)) return g.xs[hi];
                if (lb >= la) return g.xs[hi];
                const double t = (lu - la) / (lb - la);
                return g.xs[lo] + t * (g.xs[hi] - g.xs[lo]);
            } else {  // GaussTail
                return std::sqrt(-std::log(u));
            }
        },
        family_);
}

double TailModel::sample(RngStream& rng) const { return quantile(rng.next_unit()); }

double TailModel::concentration(double width) const {
    if (!(width >= 0)) throw std::invalid_argument("concentration: width must be >= 0");
    const double w = width;
    return std::visit(
        [this, w](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Pareto>) {
                return -std::expm1(-f.shape * std::log1p(w / f.scale));
            } else if constexpr (std::is_same_v<T, Exponential>) {
                return -std::expm1(-f.rate * w);
            } else if constexpr (std::is_same_v<T, WeibullRoot>) {
                return -std::expm1(-std::sqrt(w));
            } else if constexpr (std::is_same_v<T, Uniform>) {
                return std::min(w / (f.hi - f.lo), 1.0);
            } else if constexpr (std::is_same_v<T, PointMass>) {
                return 1.0;
            } else if constexpr (std::is_same_v<T, FiniteTable>) {
                double best = 0;
                for (std::size_t i = 0; i < f.points.size(); ++i) {
                    double s = 0;
                    for (std::size_t j = i; j < f.points.size(); ++j) {
                        if (f.points[j].first <= f.points[i].first + w) s += f.points[j].second;
                        else break;
                    }
                    best = std::max(best, s);
                }
                return best;
            } else if constexpr (std::is_same_v<T, PlateauExponential>) {
                const double cover = 1.0 - survival(w);  // window [0, w]
                const double exp_win = (1.0 / f.level) * (-std::expm1(-w));
                return std::max(cover, exp_win);
            } else if constexpr (std::is_same_v<T, Tabulated>) {
                const TailGrid& g = f.grid;
                if (w == 0) return largest_atom();
                auto mass = [&](double x) {
                    const double left = x <= g.xs.front() ? 1.0 : g.survival_at(x);
                    return left - g.survival_at(x + w);
                };
                double best = 0, best_x = 0;
                const double step = w / 64.0;
                const double x_hi = g.xs.back();
                for (double x = 0; x <= x_hi; x += step) {
                    const double m = mass(x);
                    if (m > best) {
                        best = m;
                        best_x = x;
                    }
                }
                best = std::max(best, golden_max(mass, std::max(0.0, best_x - step), best_x + step));
                return std::min(best, 1.0);
            } else {  // GaussTail
                if (w == 0) return 0.0;
                auto mass = [w](double x) { return std::exp(-x * x) - std::exp(-(x + w) * (x + w)); };
                return golden_max(mass, 0.0, 0.7071067811865476);
            }
        },
        family_);
}

double TailModel::unit_window_sup() const {
    return std::visit(
        [this](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Pareto>) {
                return -std::expm1(-f.shape * std::log1p(1.0 / f.scale));
            } else if constexpr (std::is_same_v<T, Exponential>) {
                return -std::expm1(-f.rate);
            } else if constexpr (std::is_same_v<T, WeibullRoot>) {
                return -std::expm1(-1.0);
            } else if constexpr (std::is_same_v<T, Uniform>) {
                return std::min(1.0 / (f.hi - f.lo), 1.0);
            } else if constexpr (std::is_same_v<T, PointMass>) {
                return 1.0;
            } else if constexpr (std::is_same_v<T, FiniteTable>) {
                // best half-open window (x-1, x] ends at an atom
                double best = 0;
                for (std::size_t i = 0; i < f.points.size(); ++i) {
                    double s = 0;
                    for (std::size_t j = 0; j <= i; ++j) {
                        if (f.points[j].first > f.points[i].first - 1.0) s += f.points[j].second;
                    }
                    best = std::max(best, s);
                }
                return best;
            } else if constexpr (std::is_same_v<T, PlateauExponential>) {
                return 1.0 - 1.0 / f.level;
            } else if constexpr (std::is_same_v<T, Tabulated>) {
                const TailGrid& g = f.grid;
                auto drop = [&](double x) {
                    const double lo = x - 1.0;
                    const double a = lo < g.xs.front() ? 1.0 : g.survival_at(lo);
                    return a - g.survival_at(x);
                };
                double best = 0, best_x = 0;
                for (double x : g.xs) {
                    const double d0 = drop(x), d1 = drop(x + 1.0);
                    if (d0 > best) { best = d0; best_x = x; }
                    if (d1 > best) { best = d1; best_x = x + 1.0; }
                }
                best = std::max(best, golden_max(drop, std::max(0.0, best_x - 1.0), best_x + 1.0));
                return std::min(best, 1.0);
            } else {  // GaussTail
                auto drop = [](double x) {
                    const double a = x < 1.0 ? 1.0 : std::exp(-(x - 1.0) * (x - 1.0));
                    return a - std::exp(-x * x);
                };
                return golden_max(drop, 1.0, 2.5);
            }
        },
        family_);
}

double TailModel::largest_atom() const {
    return std::visit(
        [](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, PointMass>) return 1.0;
            else if constexpr (std::is_same_v<T, FiniteTable>) {
                double m = 0;
                for (const auto& [v, p] : f.points) m = std::max(m, p);
                return m;
            } else if constexpr (std::is_same_v<T, PlateauExponential>) {
                return 1.0 - 1.0 / f.level;
            } else if constexpr (std::is_same_v<T, Tabulated>) {
                const double l0 = f.grid.log_sf.front();
                return l0 < 0 ? -std::expm1(l0) : 0.0;
            } else {
                return 0.0;
            }
        },
        family_);
}

std::vector<std::pair<double, double>> TailModel::atoms() const {
    return std::visit(
        [](const auto& f) -> std::vector<std::pair<double, double>> {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, PointMass>) {
                return {{f.location, 1.0}};
            } else if constexpr (std::is_same_v<T, FiniteTable>) {
                return f.points;
            } else if constexpr (std::is_same_v<T, PlateauExponential>) {
                return {{0.0, 1.0 - 1.0 / f.level}};
            } else if constexpr (std::is_same_v<T, Tabulated>) {
                const double l0 = f.grid.log_sf.front();
                if (l0 < 0) return {{f.grid.xs.front(), -std::expm1(l0)}};
                return {};
            } else {
                return {};
            }
        },
        family_);
}

bool TailModel::is_atomic() const {
    return std::holds_alternative<PointMass>(family_) || std::holds_alternative<FiniteTable>(family_);
}

bool TailModel::bounded_support() const {
    return std::visit(
        [](const auto& f) -> bool {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Uniform> || std::is_same_v<T, PointMass> ||
                          std::is_same_v<T, FiniteTable>) {
                return true;
            } else if constexpr (std::is_same_v<T, Tabulated>) {
                return !std::isfinite(f.grid.log_sf.back());
            } else {
                return false;
            }
        },
        family_);
}

double TailModel::support_upper() const {
    return std::visit(
        [](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Uniform>) return f.hi;
            else if constexpr (std::is_same_v<T, PointMass>) return f.location;
            else if constexpr (std::is_same_v<T, FiniteTable>) return f.points.back().first;
            else if constexpr (std::is_same_v<T, Tabulated>) {
                if (!std::isfinite(f.grid.log_sf.back())) {
                    for (std::size_t i = f.grid.log_sf.size(); i-- > 0;) {
                        if (std::isfinite(f.grid.log_sf[i])) return f.grid.xs[i + 1];
                    }
                }
                return kInf;
            } else {
                return kInf;
            }
        },
        family_);
}

double TailModel::cont_mass(double p, double q) const {
    if (!(q > p)) return 0.0;
    p = std::max(p, 0.0);
    return std::visit(
        [this, p, q](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, PointMass> || std::is_same_v<T, FiniteTable>) {
                return 0.0;
            } else if constexpr (std::is_same_v<T, PlateauExponential>) {
                const double P = std::max(p, f.level), Q = std::max(q, f.level);
                if (!(Q > P)) return 0.0;
                return (std::exp(-(P - f.level)) - std::exp(-(Q - f.level))) / f.level;
            } else if constexpr (std::is_same_v<T, Tabulated>) {
                double m = survival(p) - survival(q);
                for (const auto& [loc, mass] : atoms()) {
                    if (loc > p && loc <= q) m -= mass;
                }
                return std::max(m, 0.0);
            } else {
                return survival(p) - survival(q);
            }
        },
        family_);
}

double TailModel::cont_partial_mean(double p, double q) const {
    if (!(q > p)) return 0.0;
    p = std::max(p, 0.0);
    return std::visit(
        [this, p, q](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Pareto>) {
                const double A = f.scale + p, B = f.scale + q;
                const double kk = std::pow(f.scale, f.shape);
                double I;
                if (std::abs(f.shape - 1.0) < 1e-12) {
                    I = std::log(B / A);
                } else {
                    I = (std::pow(B, 1.0 - f.shape) - std::pow(A, 1.0 - f.shape)) / (1.0 - f.shape);
                }
                return f.shape * kk * I - f.scale * cont_mass(p, q);
            } else if constexpr (std::is_same_v<T, Exponential>) {
                const double ep = std::exp(-f.rate * p), eq = std::exp(-f.rate * q);
                return p * ep - q * eq + (ep - eq) / f.rate;
            } else if constexpr (std::is_same_v<T, WeibullRoot>) {
                auto G = [](double u) { return -(u * u + 2 * u + 2) * std::exp(-u); };
                return G(std::sqrt(q)) - G(std::sqrt(p));
            } else if constexpr (std::is_same_v<T, Uniform>) {
                const double P = std::max(p, f.lo), Q = std::min(q, f.hi);
                if (!(Q > P)) return 0.0;
                return 0.5 * (Q * Q - P * P) / (f.hi - f.lo);
            } else if constexpr (std::is_same_v<T, PointMass> || std::is_same_v<T, FiniteTable>) {
                return 0.0;
            } else if constexpr (std::is_same_v<T, PlateauExponential>) {
                const double P = std::max(p, f.level), Q = std::max(q, f.level);
                if (!(Q > P)) return 0.0;
                return ((P + 1) * std::exp(-(P - f.level)) - (Q + 1) * std::exp(-(Q - f.level))) /
                       f.level;
            } else if constexpr (std::is_same_v<T, Tabulated>) {
                // piecewise exponential segments of the grid
                const TailGrid& g = f.grid;
                double acc = 0;
                const double lo = std::max(p, g.xs.front()), hi = q;
                auto seg = [&](double u, double v, double lsu, double slope) {
                    // survival s(t) = exp(lsu + slope (t - u)) on [u, v]
                    const double su = std::exp(lsu);
                    const double sv = std::exp(lsu + slope * (v - u));
                    if (std::abs(slope) < 1e-300) return 0.0;
                    return u * su - v * sv + (su - sv) / (-slope);
                };
                for (std::size_t i = 0; i + 1 < g.xs.size(); ++i) {
                    const double u = std::max(lo, g.xs[i]);
                    const double v = std::min(hi, g.xs[i + 1]);
                    if (!(v > u)) continue;
                    if (!std::isfinite(g.log_sf[i])) break;
                    if (!std::isfinite(g.log_sf[i + 1])) continue;
                    const double slope = (g.log_sf[i + 1] - g.log_sf[i]) / (g.xs[i + 1] - g.xs[i]);
                    const double lsu = g.log_sf[i] + slope * (u - g.xs[i]);
                    acc += seg(u, v, lsu, slope);
                }
                if (hi > g.xs.back() && std::isfinite(g.log_sf.back())) {
                    const double slope = g.tail_slope();
                    if (slope < 0) {
                        const double u = std::max(lo, g.xs.back());
                        const double lsu = g.log_sf.back() + slope * (u - g.xs.back());
                        acc += seg(u, hi, lsu, slope);
                    }
                }
                return acc;
            } else {  // GaussTail
                const double ep = std::exp(-p * p), eq = std::exp(-q * q);
                return p * ep - q * eq + 0.5 * kSqrtPi * (std::erf(q) - std::erf(p));
            }
        },
        family_);
}

std::vector<double> TailModel::shape_knots() const {
    return std::visit(
        [](const auto& f) -> std::vector<double> {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Uniform>) return {f.lo, f.hi};
            else if constexpr (std::is_same_v<T, PointMass>) return {f.location};
            else if constexpr (std::is_same_v<T, FiniteTable>) {
                std::vector<double> ks;
                for (const auto& [v, p] : f.points) ks.push_back(v);
                return ks;
            } else if constexpr (std::is_same_v<T, PlateauExponential>) {
                return {f.level};
            } else if constexpr (std::is_same_v<T, Tabulated>) {
                return f.grid.xs;
            } else if constexpr (std::is_same_v<T, GaussTail>) {
                return {0.7071067811865476};  // density mode, survival inflection
            } else {
                return {};
            }
        },
        family_);
}

int TailModel::density_trend(double t) const {
    return std::visit(
        [t](const auto& f) -> int {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Pareto> || std::is_same_v<T, Exponential> ||
                          std::is_same_v<T, WeibullRoot>) {
                return -1;
            } else if constexpr (std::is_same_v<T, PlateauExponential>) {
                return t >= f.level ? -1 : 0;
            } else if constexpr (std::is_same_v<T, GaussTail>) {
                return t < 0.7071067811865476 ? +1 : -1;
            } else if constexpr (std::is_same_v<T, Tabulated>) {
                return -1;  // piecewise exponential: decreasing within each piece
            } else {
                return 0;
            }
        },
        family_);
}

bool TailModel::piecewise_affine_exp() const {
    return !(std::holds_alternative<Pareto>(family_) || std::holds_alternative<WeibullRoot>(family_) ||
             std::holds_alternative<GaussTail>(family_));
}

}
