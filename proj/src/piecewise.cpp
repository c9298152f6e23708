#include "otail/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace otail {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double TailPiece::eval(double t) const {
    const double s = t - lo;
    return (c + d * s) * std::exp(g * s);
}

double TailPiece::eval_end() const {
    if (!std::isfinite(hi)) return g < 0 ? 0.0 : c;
    return eval(hi);
}

double affine_exp_integral(double c, double d, double h, double delta) {
    if (!(delta > 0)) return 0.0;
    if (!std::isfinite(delta)) {
        if (!(h < 0)) throw std::invalid_argument("affine_exp_integral: divergent");
        return -c / h + d / (h * h);
    }
    const double z = h * delta;
    if (std::abs(z) < 1e-6) {
        // series around h = 0 keeps the small-exponent case exact to ~1e-24
        return c * delta * (1.0 + z / 2 + z * z / 6) +
               d * delta * delta * (0.5 + z / 3 + z * z / 8);
    }
    const double em = std::expm1(z);
    const double ez = em + 1.0;
    // \int_0^D (c + d s) e^{h s} ds = c (e^z - 1)/h + d (D e^z / h - (e^z - 1)/h^2)
    return c * em / h + d * (delta * ez / h - em / (h * h));
}

PiecewiseTail PiecewiseTail::from_model(const TailModel& m) {
    if (!m.piecewise_affine_exp()) {
        throw std::invalid_argument("PiecewiseTail: family '" + m.family_name() +
                                    "' has no affine-exponential representation");
    }
    PiecewiseTail pw;
    auto& ps = pw.pieces_;
    std::visit(
        [&](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, TailModel::Exponential>) {
                ps.push_back({0, kInf, 1.0, 0.0, -f.rate});
            } else if constexpr (std::is_same_v<T, TailModel::Uniform>) {
                if (f.lo > 0) ps.push_back({0, f.lo, 1.0, 0.0, 0.0});
                ps.push_back({f.lo, f.hi, 1.0, -1.0 / (f.hi - f.lo), 0.0});
                ps.push_back({f.hi, kInf, 0.0, 0.0, 0.0});
            } else if constexpr (std::is_same_v<T, TailModel::PointMass>) {
                if (f.location > 0) ps.push_back({0, f.location, 1.0, 0.0, 0.0});
                ps.push_back({f.location, kInf, 0.0, 0.0, 0.0});
            } else if constexpr (std::is_same_v<T, TailModel::FiniteTable>) {
                double lo = 0;
                double sf = 1.0;
                for (const auto& [v, p] : f.points) {
                    if (v > lo) {
                        ps.push_back({lo, v, sf, 0.0, 0.0});
                        lo = v;
                    }
                    sf -= p;
                }
                ps.push_back({lo, kInf, std::max(sf, 0.0), 0.0, 0.0});
            } else if constexpr (std::is_same_v<T, TailModel::PlateauExponential>) {
                ps.push_back({0, f.level, 1.0 / f.level, 0.0, 0.0});
                ps.push_back({f.level, kInf, 1.0 / f.level, 0.0, -1.0});
            } else if constexpr (std::is_same_v<T, TailModel::Tabulated>) {
                pw = from_grid(f.grid);
            } else {
                throw std::invalid_argument("PiecewiseTail: unsupported family");
            }
        },
        m.family());
    if (pw.cum_sf_.empty()) pw.finalize();
    return pw;
}

PiecewiseTail PiecewiseTail::from_grid(const TailGrid& g) {
    PiecewiseTail pw;
    auto& ps = pw.pieces_;
    const auto& xs = g.xs;
    const auto& ls = g.log_sf;
    if (xs.front() > 0) ps.push_back({0, xs.front(), 1.0, 0.0, 0.0});
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const double la = ls[i], lb = ls[i + 1];
        if (!std::isfinite(la)) {
            ps.push_back({xs[i], kInf, 0.0, 0.0, 0.0});
            pw.finalize();
            return pw;
        }
        const double sa = std::exp(la);
        if (!std::isfinite(lb)) {
            // survival holds, then drops to zero at the right node
            ps.push_back({xs[i], xs[i + 1], sa, 0.0, 0.0});
            continue;
        }
        const double slope = (lb - la) / (xs[i + 1] - xs[i]);
        ps.push_back({xs[i], xs[i + 1], sa, 0.0, slope});
    }
    const double last = ls.back();
    if (std::isfinite(last) && std::exp(last) > 0) {
        const double slope = g.tail_slope();
        ps.push_back({xs.back(), kInf, std::exp(last), 0.0, slope < 0 ? slope : -1e-300});
    } else {
        ps.push_back({xs.back(), kInf, 0.0, 0.0, 0.0});
    }
    pw.finalize();
    return pw;
}

void PiecewiseTail::finalize() {
    if (pieces_.empty()) throw std::invalid_argument("PiecewiseTail: no pieces");
    atoms_.clear();
    double prev_end = 1.0;
    for (auto& p : pieces_) {
        const double here = p.c;
        if (prev_end - here > 1e-15) atoms_.emplace_back(p.lo, prev_end - here);
        prev_end = p.eval_end();
    }
    if (prev_end > 1e-15 && std::isfinite(pieces_.back().hi)) {
        // should not happen: last piece must cover [., inf)
        throw std::logic_error("PiecewiseTail: pieces do not cover the support");
    }
    cum_sf_.assign(pieces_.size() + 1, 0.0);
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        const auto& p = pieces_[i];
        if (!std::isfinite(p.hi)) {
            cum_sf_[i + 1] = kInf;  // unused; integral_sf handles the last piece directly
        } else {
            cum_sf_[i + 1] = cum_sf_[i] + affine_exp_integral(p.c, p.d, p.g, p.hi - p.lo);
        }
    }
}

double PiecewiseTail::eval(double t) const {
    if (t < 0) return 1.0;
    if (t < pieces_.front().lo) return 1.0;
    return pieces_[piece_index(t)].eval(t);
}

std::size_t PiecewiseTail::piece_index(double t) const {
    std::size_t lo = 0, hi = pieces_.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi + 1) / 2;
        if (pieces_[mid].lo <= t) lo = mid;
        else hi = mid - 1;
    }
    return lo;
}

double PiecewiseTail::integral_sf(double z) const {
    if (!(z > 0)) return 0.0;
    const std::size_t i = piece_index(z);
    const auto& p = pieces_[i];
    const double v = std::min(z, p.hi);
    return cum_sf_[i] + affine_exp_integral(p.c, p.d, p.g, v - p.lo);
}

double PiecewiseTail::integral_sf_segment(double p, double q) const {
    p = std::max(p, 0.0);
    if (!(q > p)) return 0.0;
    double acc = 0;
    for (std::size_t i = piece_index(p); i < pieces_.size(); ++i) {
        const auto& pc = pieces_[i];
        if (pc.lo >= q) break;
        const double u = std::max(p, pc.lo);
        const double v = std::min(q, pc.hi);
        if (!(v > u)) continue;
        const double cu = pc.c + pc.d * (u - pc.lo);
        acc += std::exp(pc.g * (u - pc.lo)) * affine_exp_integral(cu, pc.d, pc.g, v - u);
    }
    return acc;
}

double PiecewiseTail::cont_mass(double p, double q) const {
    if (!(q > p)) return 0.0;
    double m = eval(std::max(p, 0.0)) - eval(q);
    for (const auto& [loc, mass] : atoms_) {
        if (loc > p && loc <= q) m -= mass;
    }
    return std::max(m, 0.0);
}

double PiecewiseTail::cont_partial_mean(double p, double q) const {
    if (!(q > p)) return 0.0;
    p = std::max(p, 0.0);
    double acc = 0;
    for (std::size_t i = piece_index(p); i < pieces_.size(); ++i) {
        const auto& pc = pieces_[i];
        if (pc.lo >= q) break;
        const double u = std::max(p, pc.lo);
        const double v = std::min(q, pc.hi);
        if (!(v > u)) continue;
        // within a piece: d(1 - s) has density -s'(t); by parts,
        // \int_u^v t dF = u s(u) - v s(v) + \int_u^v s dt
        const double su = pc.eval(u);
        const double sv = std::isfinite(v) ? pc.eval(v) : 0.0;
        const double seg_int =
            affine_exp_integral(pc.c + pc.d * (u - pc.lo), pc.d, pc.g, v - u) *
            std::exp(pc.g * (u - pc.lo));
        const double v_term = std::isfinite(v) ? v * sv : 0.0;
        acc += u * su - v_term + seg_int;
    }
    return std::max(acc, 0.0);
}

}
