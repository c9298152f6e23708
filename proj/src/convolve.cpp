#include "otail/convolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <unordered_map>
#include <stdexcept>

#include "otail/grid.hpp"

namespace otail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// per-step allowance for accumulated float roundoff in the exact kernels
constexpr double kFloatSlop = 1e-13;

bool is_exp(const TailModel& m) { return std::holds_alternative<TailModel::Exponential>(m.family()); }
bool is_uniform(const TailModel& m) { return std::holds_alternative<TailModel::Uniform>(m.family()); }
bool is_plateau(const TailModel& m) {
    return std::holds_alternative<TailModel::PlateauExponential>(m.family());
}
bool has_exact_kernel(const TailModel& m) { return is_exp(m) || is_uniform(m) || is_plateau(m); }

// ---------------------------------------------------------------------------
// A-side state: parametric model and/or exact piecewise representation
// ---------------------------------------------------------------------------
struct AState {
    const TailModel* model = nullptr;
    std::shared_ptr<PiecewiseTail> pw;
    double err = 0;

    static AState from_model(const TailModel& m, double err = 0) {
        AState a;
        a.model = &m;
        if (m.piecewise_affine_exp()) a.pw = std::make_shared<PiecewiseTail>(PiecewiseTail::from_model(m));
        a.err = err;
        return a;
    }
    static AState from_grid(const TailGrid& g) {
        AState a;
        a.pw = std::make_shared<PiecewiseTail>(PiecewiseTail::from_grid(g));
        a.err = g.abs_error_bound;
        return a;
    }

    double sf(double t) const { return model ? model->survival(t) : pw->eval(t); }
    bool atomic() const { return model && model->is_atomic(); }
};

// ---------------------------------------------------------------------------
// exact kernels against an affine-exponential piecewise A
// ---------------------------------------------------------------------------

// \int_u^v e^{-rate (x - t)} survival_piece(t) dt, chunked so no intermediate
// exponent can overflow
double exp_seg_increment(const TailPiece& pc, double rate, double x, double u, double v) {
    const double h = pc.g + rate;
    double acc = 0;
    double a = u;
    while (a < v) {
        double b = v;
        if (h > 0 && h * (b - a) > 500.0) b = a + 500.0 / h;
        const double cu = pc.c + pc.d * (a - pc.lo);
        const double pre = std::exp(-rate * (x - a) + pc.g * (a - pc.lo));
        acc += pre * affine_exp_integral(cu, pc.d, h, b - a);
        a = b;
    }
    return acc;
}

// tail of A + Exp(rate) at sorted points (negative points yield 1)
std::vector<double> exp_kernel(const PiecewiseTail& A, double rate, const std::vector<double>& xs) {
    std::vector<double> out(xs.size(), 1.0);
    const auto& ps = A.pieces();
    double running = 0;  // R(x) = rate * int_0^x e^{-rate (x - t)} sfA(t) dt
    double prev = 0;
    std::size_t pidx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double x = xs[i];
        if (x < 0) continue;
        if (x > prev) {
            double inc = 0;
            while (pidx + 1 < ps.size() && ps[pidx].hi <= prev) ++pidx;
            for (std::size_t k = pidx; k < ps.size(); ++k) {
                const auto& pc = ps[k];
                if (pc.lo >= x) break;
                const double u = std::max(prev, pc.lo);
                const double v = std::min(x, pc.hi);
                if (v > u) inc += exp_seg_increment(pc, rate, x, u, v);
            }
            running = running * std::exp(-rate * (x - prev)) + rate * inc;
            prev = x;
        }
        out[i] = std::min(1.0, std::exp(-rate * x) + running);
    }
    return out;
}

// tail of A + Uniform(lo, hi) at arbitrary points
std::vector<double> uniform_kernel(const PiecewiseTail& A, double lo, double hi,
                                   const std::vector<double>& xs) {
    std::vector<double> out(xs.size());
    const double width = hi - lo;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double x = xs[i];
        const double t_lo = x - hi, t_hi = x - lo;
        if (t_hi <= 0) {
            out[i] = 1.0;
            continue;
        }
        const double neg_len = std::max(0.0, std::min(t_hi, 0.0) - t_lo);
        const double pos = A.integral_sf_segment(std::max(t_lo, 0.0), t_hi);
        out[i] = std::min(1.0, (neg_len + pos) / width);
    }
    return out;
}

std::vector<double> plateau_kernel(const PiecewiseTail& A, double level,
                                   const std::vector<double>& xs) {
    std::vector<double> shifted(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) shifted[i] = xs[i] - level;
    const std::vector<double> exp_part = exp_kernel(A, 1.0, shifted);
    std::vector<double> out(xs.size());
    const double atom = 1.0 - 1.0 / level;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out[i] = std::min(1.0, atom * A.eval(xs[i]) + (1.0 / level) * exp_part[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// bracketed Stieltjes panel quadrature for the remaining measures
// ---------------------------------------------------------------------------

struct Measure {
    const TailModel* model = nullptr;
    const PiecewiseTail* pw = nullptr;

    double sf(double y) const { return model ? model->survival(y) : pw->eval(y); }
    double cmass(double p, double q) const {
        return model ? model->cont_mass(p, q) : pw->cont_mass(p, q);
    }
    double cmean(double p, double q) const {
        return model ? model->cont_partial_mean(p, q) : pw->cont_partial_mean(p, q);
    }
    std::vector<std::pair<double, double>> atoms() const {
        return model ? model->atoms() : pw->atoms();
    }
};

struct GSide {
    const TailModel* model = nullptr;
    const PiecewiseTail* pw = nullptr;

    double sf(double t) const { return model ? model->survival(t) : pw->eval(t); }
    std::vector<double> knots() const {
        if (model) return model->shape_knots();
        std::vector<double> ks;
        ks.reserve(pw->pieces().size());
        for (const auto& pc : pw->pieces()) ks.push_back(pc.lo);
        return ks;
    }
    // density trend at t: <= 0 means survival(x - y) is convex in y there
    int trend(double t) const { return model ? model->density_trend(t) : -1; }
};

struct Panel {
    double p, q;
    double gp, gq;  // cached survival of the evaluated side at x - p, x - q
    double sp, sq;  // cached measure survival at p, q
    double lo, hi;  // bracket on the panel integral
};

Panel make_panel(double x, const Measure& ms, const GSide& g, double p, double q, double gp,
                 double gq, double sp, double sq, bool atomless) {
    Panel pan{p, q, gp, gq, sp, sq, 0, 0};
    const double m = atomless ? std::max(sp - sq, 0.0) : ms.cmass(p, q);
    if (!(m > 0)) return pan;
    const double pm = ms.cmean(p, q);
    const double ybar = std::clamp(pm / m, p, q);
    const double gbar = g.sf(x - ybar);
    double secant;
    if (q - p > 0) {
        secant = m * (gp * (q - ybar) + gq * (ybar - p)) / (q - p);
    } else {
        secant = m * gbar;
    }
    const double jensen = m * gbar;
    if (g.trend(x - 0.5 * (p + q)) <= 0) {
        pan.lo = jensen;
        pan.hi = secant;
    } else {
        pan.lo = secant;
        pan.hi = jensen;
    }
    if (pan.lo > pan.hi) std::swap(pan.lo, pan.hi);
    return pan;
}

struct PanelOut {
    double value;
    double half_width;
};

PanelOut panel_quadrature_at(double x, const Measure& ms, const GSide& g, double node_tol,
                             std::size_t max_panels) {
    double value = ms.sf(x);  // all mass beyond x sees survival 1 of the other side
    for (const auto& [c, p] : ms.atoms()) {
        if (c <= x) value += p * g.sf(x - c);
    }
    if (!(x > 0)) return {std::min(value, 1.0), 0.0};

    // initial breakpoints: kink abscissas of the evaluated side plus geometric
    // ladders into both ends (the integrand curves hardest near y = x, the
    // measure concentrates near 0)
    std::vector<double> pts{0.0, x};
    for (double t : g.knots()) {
        const double y = x - t;
        if (y > 0 && y < x) pts.push_back(y);
    }
    for (int j = 2; j <= 80; ++j) {
        const double d = x * std::pow(2.0, -0.5 * j);
        if (d < 1e-9 * x) break;
        pts.push_back(x - d);
        pts.push_back(d);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](double a, double b) { return b - a < 1e-14; }),
              pts.end());

    const bool atomless = ms.atoms().empty();
    auto cmp = [](const Panel& a, const Panel& b) { return (a.hi - a.lo) < (b.hi - b.lo); };
    std::priority_queue<Panel, std::vector<Panel>, decltype(cmp)> heap(cmp);
    double total_width = 0;
    double total_lo = 0;
    std::vector<double> gvals(pts.size()), svals(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        gvals[i] = g.sf(x - pts[i]);
        svals[i] = ms.sf(pts[i]);
    }
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        Panel pan = make_panel(x, ms, g, pts[i], pts[i + 1], gvals[i], gvals[i + 1], svals[i],
                               svals[i + 1], atomless);
        total_width += pan.hi - pan.lo;
        total_lo += pan.lo;
        heap.push(pan);
    }
    std::size_t n_panels = pts.size() - 1;
    while (total_width > 2 * node_tol && n_panels < max_panels && !heap.empty()) {
        Panel worst = heap.top();
        heap.pop();
        total_width -= worst.hi - worst.lo;
        total_lo -= worst.lo;
        const double mid = 0.5 * (worst.p + worst.q);
        if (!(mid > worst.p && mid < worst.q)) {  // cannot split further
            total_width += worst.hi - worst.lo;
            total_lo += worst.lo;
            break;
        }
        const double gm = g.sf(x - mid);
        const double sm = ms.sf(mid);
        Panel a = make_panel(x, ms, g, worst.p, mid, worst.gp, gm, worst.sp, sm, atomless);
        Panel b = make_panel(x, ms, g, mid, worst.q, gm, worst.gq, sm, worst.sq, atomless);
        total_width += (a.hi - a.lo) + (b.hi - b.lo);
        total_lo += a.lo + b.lo;
        heap.push(a);
        heap.push(b);
        ++n_panels;
    }
    value += total_lo + 0.5 * total_width;
    return {std::min(value, 1.0), 0.5 * total_width};
}

// ---------------------------------------------------------------------------
// single convolution evaluation at given points
// ---------------------------------------------------------------------------

struct EvalOut {
    std::vector<double> values;
    double quad = 0;      // max half bracket over nodes
    double b_err = 0;     // error bound carried by b itself (tabulated b)
    bool panel_capped = false;
};

double tabulated_err(const TailModel& m) {
    if (const auto* t = std::get_if<TailModel::Tabulated>(&m.family())) {
        return t->grid.abs_error_bound;
    }
    return 0;
}

EvalOut conv_eval(const AState& a, const TailModel& b, const std::vector<double>& xs,
                  double node_tol, const ConvOptions& opts) {
    EvalOut out;
    out.b_err = tabulated_err(b);
    out.values.resize(xs.size());

    // atoms on either side: exact mixture of shifted tails
    if (b.is_atomic()) {
        const auto atoms = b.atoms();
        for (std::size_t i = 0; i < xs.size(); ++i) {
            double v = 0;
            for (const auto& [c, p] : atoms) v += p * a.sf(xs[i] - c);
            out.values[i] = std::min(v, 1.0);
        }
        return out;
    }
    if (a.atomic()) {
        const auto atoms = a.model->atoms();
        for (std::size_t i = 0; i < xs.size(); ++i) {
            double v = 0;
            for (const auto& [c, p] : atoms) v += p * b.survival(xs[i] - c);
            out.values[i] = std::min(v, 1.0);
        }
        return out;
    }

    // exact affine-exponential kernels
    if (a.pw && has_exact_kernel(b)) {
        if (is_exp(b)) {
            out.values = exp_kernel(*a.pw, std::get<TailModel::Exponential>(b.family()).rate, xs);
        } else if (is_uniform(b)) {
            const auto& u = std::get<TailModel::Uniform>(b.family());
            out.values = uniform_kernel(*a.pw, u.lo, u.hi, xs);
        } else {
            out.values = plateau_kernel(*a.pw, std::get<TailModel::PlateauExponential>(b.family()).level, xs);
        }
        return out;
    }
    if (a.model && has_exact_kernel(*a.model) && b.piecewise_affine_exp()) {
        // roles swapped: convolution is symmetric
        const PiecewiseTail bpw = PiecewiseTail::from_model(b);
        if (is_exp(*a.model)) {
            out.values = exp_kernel(bpw, std::get<TailModel::Exponential>(a.model->family()).rate, xs);
        } else if (is_uniform(*a.model)) {
            const auto& u = std::get<TailModel::Uniform>(a.model->family());
            out.values = uniform_kernel(bpw, u.lo, u.hi, xs);
        } else {
            out.values =
                plateau_kernel(bpw, std::get<TailModel::PlateauExponential>(a.model->family()).level, xs);
        }
        return out;
    }

    // bracketed panel quadrature; grids prefer the measure side, a smooth
    // parametric side carries the evaluations
    Measure ms;
    GSide g;
    std::shared_ptr<PiecewiseTail> hold;  // keeps a b-side rep alive
    if (a.pw && !b.piecewise_affine_exp()) {
        ms.pw = a.pw.get();
        g.model = &b;
    } else if (a.model && !a.model->piecewise_affine_exp() && b.piecewise_affine_exp()) {
        hold = std::make_shared<PiecewiseTail>(PiecewiseTail::from_model(b));
        ms.pw = hold.get();
        g.model = a.model;
    } else if (a.model && !a.model->piecewise_affine_exp() && !b.piecewise_affine_exp()) {
        ms.model = &b;
        g.model = a.model;
    } else if (a.pw && b.piecewise_affine_exp()) {
        // both sides piecewise (e.g. grid + tabulated): bigger one is the measure
        hold = std::make_shared<PiecewiseTail>(PiecewiseTail::from_model(b));
        if (hold->pieces().size() <= a.pw->pieces().size()) {
            ms.pw = a.pw.get();
            g.pw = hold.get();
        } else {
            ms.pw = hold.get();
            g.pw = a.pw.get();
        }
    } else {
        throw std::logic_error("conv_eval: unhandled operand combination");
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const PanelOut po = panel_quadrature_at(xs[i], ms, g, node_tol, opts.max_panels_per_node);
        out.values[i] = po.value;
        out.quad = std::max(out.quad, po.half_width);
        if (po.half_width > node_tol) out.panel_capped = true;
    }
    return out;
}

// ---------------------------------------------------------------------------
// refinement loop: evaluate on grid + midpoints, measure the interpolation
// gap, refine the worst segments until the step budget holds
// ---------------------------------------------------------------------------

struct StepOut {
    TailGrid grid;
    double step_err = 0;
    bool tol_met = true;
};

struct Midpointed {
    std::vector<double> pts;
    std::vector<std::size_t> node_idx;  // position of base node i in pts
    std::vector<std::size_t> mid_idx;   // position of segment i's midpoint, npos if degenerate
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

Midpointed with_midpoints(const std::vector<double>& xs) {
    Midpointed m;
    m.pts.reserve(xs.size() * 2);
    m.node_idx.resize(xs.size());
    m.mid_idx.assign(xs.size() > 0 ? xs.size() - 1 : 0, Midpointed::npos);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        m.node_idx[i] = m.pts.size();
        m.pts.push_back(xs[i]);
        if (i + 1 < xs.size()) {
            const double mid = 0.5 * (xs[i] + xs[i + 1]);
            if (mid > xs[i] && mid < xs[i + 1]) {
                m.mid_idx[i] = m.pts.size();
                m.pts.push_back(mid);
            }
        }
    }
    return m;
}

// Output kinks sit where an atom of one operand meets a kink (or the support
// origin, where a density may be singular) of the other. Midpoint halving
// closes in on such points only geometrically, so seed two-sided geometric
// ladders there down to float resolution.
void add_kink_clusters(std::vector<double>& base, const AState& a, const TailModel& b) {
    std::vector<double> anchors;
    const auto atoms_a = a.model ? a.model->atoms() : a.pw->atoms();
    auto combine = [&anchors](const std::vector<std::pair<double, double>>& atoms,
                              std::vector<double> knots) {
        knots.push_back(0.0);
        for (const auto& [c, p] : atoms) {
            for (double k : knots) anchors.push_back(c + k);
        }
    };
    combine(atoms_a, b.shape_knots());
    combine(b.atoms(), a.model ? a.model->shape_knots() : std::vector<double>{});
    if (anchors.empty()) return;
    const double x_lo = base.front(), x_hi = base.back();
    std::vector<double> merged = base;
    for (double t0 : anchors) {
        if (t0 >= x_lo && t0 <= x_hi) merged.push_back(t0);
        for (int j = 0; j <= 106; ++j) {
            const double d = std::pow(2.0, -0.5 * j);
            if (d < 1e-16 * std::max(1.0, std::abs(t0))) break;
            for (double cand : {t0 + d, t0 - d}) {
                if (cand > x_lo && cand < x_hi) merged.push_back(cand);
            }
        }
    }
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    base = std::move(merged);
}

TailGrid assemble_grid(const std::vector<double>& xs, std::vector<double> values, double bound,
                       bool tol_met) {
    // monotone cleanup of float-level wiggle, then to log space
    double prev = 1.0;
    for (auto& v : values) {
        v = std::clamp(v, 0.0, prev);
        prev = v;
    }
    TailGrid g;
    g.xs = xs;
    g.log_sf.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        g.log_sf[i] = values[i] > 0 ? std::log(values[i]) : kNegInf;
    }
    g.abs_error_bound = bound;
    g.tol_met = tol_met;
    return g;
}

StepOut conv_step(const AState& a, const TailModel& b, std::vector<double> base,
                  double budget, const ConvOptions& opts) {
    StepOut so;
    // Quadrature noise must sit below the gap threshold or bracket jitter
    // masquerades as interpolation error and refinement never settles. With
    // node_tol = budget/16 and the threshold at 3 budget/16, the honest
    // account 5 quad + 2 gap (measured gaps carry up to 2 quad of noise)
    // still closes below the budget.
    const double node_tol = budget / 16;
    add_kink_clusters(base, a, b);
    // values are pointwise-deterministic: refinement rounds only add points,
    // so evaluate each abscissa once
    std::unordered_map<double, double> vcache;
    double quad = 0;
    bool capped = false;
    const double b_err = tabulated_err(b);
    auto value_at = [&](double x) { return vcache.find(x)->second; };
    for (int round = 0;; ++round) {
        const Midpointed mp = with_midpoints(base);
        std::vector<double> missing;
        for (double x : mp.pts) {
            if (!vcache.count(x)) missing.push_back(x);
        }
        if (!missing.empty()) {
            const EvalOut ev = conv_eval(a, b, missing, node_tol, opts);
            quad = std::max(quad, ev.quad);
            capped = capped || ev.panel_capped;
            for (std::size_t i = 0; i < missing.size(); ++i) vcache[missing[i]] = ev.values[i];
        }

        // measured interpolation gap of the base grid at its midpoints
        double gap = 0;
        std::vector<std::size_t> bad;
        for (std::size_t i = 0; i + 1 < base.size(); ++i) {
            if (mp.mid_idx[i] == Midpointed::npos) continue;
            const double vl = value_at(base[i]);
            const double vr = value_at(base[i + 1]);
            const double vm = value_at(mp.pts[mp.mid_idx[i]]);
            const double interp = (vl > 0 && vr > 0) ? std::exp(0.5 * (std::log(vl) + std::log(vr))) : 0.0;
            const double seg_gap = std::abs(vm - interp);
            gap = std::max(gap, seg_gap);
            if (seg_gap > 3 * budget / 16) bad.push_back(i);
        }

        const double step_err = 5 * quad + 2 * gap + kFloatSlop;
        const bool ok = step_err <= budget;
        const bool can_refine = !bad.empty() && mp.pts.size() < opts.max_nodes &&
                                round < opts.max_refine_rounds;
        if (ok || !can_refine) {
            // midpoints only served the gap estimate; the bound covers the
            // base grid's interpolation, so the output stays on base
            std::vector<double> vals(base.size());
            for (std::size_t i = 0; i < base.size(); ++i) vals[i] = value_at(base[i]);
            so.step_err = step_err + a.err + b_err;
            so.tol_met = ok && !capped;
            so.grid = assemble_grid(base, std::move(vals), so.step_err, so.tol_met);
            so.grid.validate();
            return so;
        }
        base = insert_midpoints(base, bad);
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// public surface
// ---------------------------------------------------------------------------

TailGrid conv_pair(const TailModel& a, const TailModel& b, const std::vector<double>& xs,
                   double tol, const ConvOptions& opts) {
    if (!(tol > 0)) throw std::invalid_argument("conv_pair: tol must be > 0");
    const AState as = AState::from_model(a, tabulated_err(a));
    return conv_step(as, b, xs, tol, opts).grid;
}

PointwiseConv conv_tail_at(const TailModel& a, const TailModel& b, const std::vector<double>& xs,
                           double node_tol, const ConvOptions& opts) {
    if (!(node_tol > 0)) throw std::invalid_argument("conv_tail_at: node_tol must be > 0");
    std::vector<std::size_t> order(xs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return xs[i] < xs[j]; });
    std::vector<double> sorted(xs.size());
    for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = xs[order[i]];
    const AState as = AState::from_model(a, tabulated_err(a));
    const EvalOut ev = conv_eval(as, b, sorted, node_tol, opts);
    PointwiseConv out;
    out.values.resize(xs.size());
    for (std::size_t i = 0; i < order.size(); ++i) out.values[order[i]] = ev.values[i];
    out.quad = ev.quad + as.err + ev.b_err;
    out.tol_met = !ev.panel_capped;
    return out;
}

TailGrid conv_pair(const TailGrid& a, const TailModel& b, const std::vector<double>& xs,
                   double tol, const ConvOptions& opts) {
    if (!(tol > 0)) throw std::invalid_argument("conv_pair: tol must be > 0");
    a.validate();
    const AState as = AState::from_grid(a);
    return conv_step(as, b, xs, tol, opts).grid;
}

double ChainBuilder::Term::sf(double x) const {
    if (const auto* m = std::get_if<TailModel>(&rep)) return m->survival(x);
    return std::get<TailGrid>(rep).survival_at(x);
}

double ChainBuilder::Term::log_sf(double x) const {
    if (const auto* m = std::get_if<TailModel>(&rep)) return m->log_survival(x);
    return std::get<TailGrid>(rep).log_sf_at(x);
}

ChainBuilder::ChainBuilder(const SequenceSpec& spec, std::vector<double> grid, ConvOptions opts)
    : spec_(&spec), grid_(std::move(grid)), opts_(opts) {
    if (grid_.size() < 2) throw std::invalid_argument("ChainBuilder: grid too short");
}

void ChainBuilder::extend(long n, const std::function<double(long)>& step_budget) {
    if (terms_.empty()) {
        terms_.push_back({spec_->resolve(1), 0.0});
    }
    while (built() < n) {
        const long i = built() + 1;
        const TailModel b = spec_->resolve(i);
        Term& prev = terms_.back();

        // atomic + atomic stays an exact finite table
        const auto* pm = std::get_if<TailModel>(&prev.rep);
        if (pm && pm->is_atomic() && b.is_atomic()) {
            std::map<double, double> sums;
            for (const auto& [va, pa] : pm->atoms()) {
                for (const auto& [vb, pb] : b.atoms()) sums[va + vb] += pa * pb;
            }
            std::vector<std::pair<double, double>> pts(sums.begin(), sums.end());
            double total = 0;
            for (auto& [v, p] : pts) total += p;
            for (auto& [v, p] : pts) p /= total;  // scrub float drift off the simplex
            terms_.push_back({TailModel::finite_table(std::move(pts)), prev.err});
            continue;
        }

        AState as = pm ? AState::from_model(*pm, prev.err)
                       : AState::from_grid(std::get<TailGrid>(prev.rep));
        StepOut so = conv_step(as, b, grid_, step_budget(i), opts_);
        if (!so.tol_met) tol_met_ = false;
        grid_ = so.grid.xs;
        terms_.push_back({std::move(so.grid), 0.0});
        terms_.back().err = std::get<TailGrid>(terms_.back().rep).abs_error_bound;
    }
}

const ChainBuilder::Term& ChainBuilder::term(long n) const {
    if (n < 1 || n > built()) throw std::invalid_argument("ChainBuilder: term out of range");
    return terms_[static_cast<std::size_t>(n - 1)];
}

TailGrid conv_chain(const SequenceSpec& spec, long n, const std::vector<double>& xs, double tol,
                    const ConvOptions& opts) {
    if (n < 1) throw std::invalid_argument("conv_chain: n must be >= 1");
    if (!(tol > 0)) throw std::invalid_argument("conv_chain: tol must be > 0");
    ChainBuilder cb(spec, xs, opts);
    cb.extend(n, [&](long) { return tol / static_cast<double>(n); });
    const ChainBuilder::Term& t = cb.term(n);
    if (const auto* g = std::get_if<TailGrid>(&t.rep)) return *g;
    // S_n still parametric (n = 1 or an all-atomic prefix): materialize
    const AState as = AState::from_model(std::get<TailModel>(t.rep), t.err);
    const TailModel delta0 = TailModel::point_mass(0.0);
    return conv_step(as, delta0, cb.grid(), tol, opts).grid;
}

// ---------------------------------------------------------------------------
// closed-form oracle
// ---------------------------------------------------------------------------

double ExactTail::sf(double x) const {
    if (x < 0) return 1.0;
    switch (kind) {
        case Kind::single:
            return single->survival(x);
        case Kind::erlang: {
            const long double lx = static_cast<long double>(rate) * x;
            long double term = std::exp(-lx);  // j = 0
            long double sum = term;
            for (long j = 1; j < n; ++j) {
                term *= lx / j;
                sum += term;
            }
            return static_cast<double>(std::min<long double>(sum, 1.0L));
        }
        case Kind::hypoexp: {
            long double s = 0;
            for (std::size_t i = 0; i < rates.size(); ++i) {
                long double w = 1.0L;
                for (std::size_t j = 0; j < rates.size(); ++j) {
                    if (j != i) w *= rates[j] / (rates[j] - rates[i]);
                }
                s += w * std::exp(-static_cast<long double>(rates[i]) * x);
            }
            return static_cast<double>(std::clamp<long double>(s, 0.0L, 1.0L));
        }
        case Kind::irwin_hall: {
            if (x >= static_cast<double>(n)) return 0.0;
            long double cdf = 0;
            long double binom = 1;  // C(n, k)
            for (long k = 0; k <= static_cast<long>(std::floor(x)); ++k) {
                if (k > 0) binom *= static_cast<long double>(n - k + 1) / k;
                const long double base = static_cast<long double>(x) - k;
                long double pw = 1;
                for (long j = 0; j < n; ++j) pw *= base;
                cdf += (k % 2 == 0 ? 1.0L : -1.0L) * binom * pw;
            }
            for (long j = 2; j <= n; ++j) cdf /= j;
            return static_cast<double>(std::clamp<long double>(1.0L - cdf, 0.0L, 1.0L));
        }
    }
    return 0;
}

double ExactTail::log_sf(double x) const {
    const double s = sf(x);
    return s > 0 ? std::log(s) : kNegInf;
}

std::string ExactTail::name() const {
    switch (kind) {
        case Kind::single: return "single";
        case Kind::erlang: return "erlang";
        case Kind::hypoexp: return "hypoexponential";
        case Kind::irwin_hall: return "irwin_hall";
    }
    return "?";
}

std::optional<ExactTail> exact_tail_oracle(const SequenceSpec& spec, long n) {
    if (n < 1) return std::nullopt;
    if (n == 1) {
        ExactTail e;
        e.kind = ExactTail::Kind::single;
        e.single = spec.resolve(1);
        e.n = 1;
        return e;
    }
    std::vector<TailModel> models;
    models.reserve(static_cast<std::size_t>(n));
    for (long i = 1; i <= n; ++i) models.push_back(spec.resolve(i));

    bool all_exp = true, all_std_uniform = true;
    for (const auto& m : models) {
        if (!is_exp(m)) all_exp = false;
        if (const auto* u = std::get_if<TailModel::Uniform>(&m.family())) {
            if (u->lo != 0.0 || u->hi != 1.0) all_std_uniform = false;
        } else {
            all_std_uniform = false;
        }
    }
    if (all_exp) {
        std::vector<double> rates;
        for (const auto& m : models) rates.push_back(std::get<TailModel::Exponential>(m.family()).rate);
        const bool all_equal = std::all_of(rates.begin(), rates.end(),
                                           [&](double r) { return r == rates.front(); });
        ExactTail e;
        e.n = n;
        if (all_equal) {
            e.kind = ExactTail::Kind::erlang;
            e.rate = rates.front();
            return e;
        }
        std::vector<double> sorted = rates;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end()) {
            e.kind = ExactTail::Kind::hypoexp;
            e.rates = rates;
            return e;
        }
        return std::nullopt;  // repeated-but-not-identical rates: no registered form
    }
    if (all_std_uniform) {
        ExactTail e;
        e.kind = ExactTail::Kind::irwin_hall;
        e.n = n;
        return e;
    }
    return std::nullopt;
}

}
