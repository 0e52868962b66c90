#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "selftrap/closed_forms.hpp"
#include "selftrap/linear_response.hpp"
#include "selftrap/quantum_rates.hpp"

namespace selftrap {

// Detuning-grid sweep.  Matrices are row-major [i1 * n2 + i2]; cells where no
// stable equilibrium exists are masked (stable = 0) and carry NaN in gamma,
// omega_m and nmin.  nmin is NaN also at stable heating cells.
struct SweepGrid {
    std::vector<double> delta1_axis, delta2_axis;
    int n1 = 0, n2 = 0;
    std::vector<double> gamma, omega_m, nmin, x0, d1x, d2x;
    std::vector<std::uint8_t> stable;

    std::size_t idx(int i1, int i2) const {
        return static_cast<std::size_t>(i1) * n2 + i2;
    }
};

namespace detail {

inline std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i)
        v[i] = (n == 1) ? lo : lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    return v;
}

// chunked parallel loop; results land in preallocated slots so the outcome
// is independent of scheduling
template <typename Fn>
inline void parallel_for(int n, int threads, Fn&& fn) {
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    const int used = std::min(threads, n);
    for (int t = 0; t < used; ++t) {
        pool.emplace_back([&, t] {
            for (int i = t; i < n; i += used) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace detail

// Per cell: solve_equilibrium (deepest branch on ambiguity) ->
// mechanical_frequency -> cooling_rate -> min_phonon.  Failures only mask the
// cell, never abort the sweep.
inline SweepGrid sweep_map(const ScaledParams& base, std::pair<double, double> d1_range,
                           std::pair<double, double> d2_range, std::pair<int, int> resolution,
                           int threads = 1) {
    base.validate();
    if (resolution.first < 2 || resolution.second < 2)
        throw InvalidParameterError("sweep_map: resolution must be >= 2 per axis");

    SweepGrid grid;
    grid.n1 = resolution.first;
    grid.n2 = resolution.second;
    grid.delta1_axis = detail::linspace(d1_range.first, d1_range.second, grid.n1);
    grid.delta2_axis = detail::linspace(d2_range.first, d2_range.second, grid.n2);
    const std::size_t cells = static_cast<std::size_t>(grid.n1) * grid.n2;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    grid.gamma.assign(cells, nan);
    grid.omega_m.assign(cells, nan);
    grid.nmin.assign(cells, nan);
    grid.x0.assign(cells, nan);
    grid.d1x.assign(cells, nan);
    grid.d2x.assign(cells, nan);
    grid.stable.assign(cells, 0);

    detail::parallel_for(grid.n1, threads, [&](int i1) {
        for (int i2 = 0; i2 < grid.n2; ++i2) {
            const std::size_t k = grid.idx(i1, i2);
            ScaledParams p = base;
            p.delta1 = grid.delta1_axis[i1];
            p.delta2 = grid.delta2_axis[i2];
            try {
                const Equilibrium eq = solve_equilibrium_deepest(p);
                grid.x0[k] = eq.x0;
                grid.d1x[k] = eq.d1x;
                grid.d2x[k] = eq.d2x;
                const CoolingReport rep = cooling_rate(eq, p);
                grid.omega_m[k] = rep.omega_m;
                grid.gamma[k] = rep.gamma;
                if (rep.nmin) grid.nmin[k] = *rep.nmin;
                grid.stable[k] = 1;
            } catch (const SolverError&) {
                // masked cell
            }
        }
    });
    return grid;
}

// Zero contour of Delta_i^x -+ omega_M, traced over a sweep grid.  r-loci are
// the red (cooling) resonances Delta^x = -omega_M, a-loci the blue (Stokes)
// ones.  The +/- branch label follows the sign of the other field's
// effective detuning.
struct ResonanceLocus {
    enum class Kind { r1_plus, r1_minus, r2_plus, r2_minus, a1_plus, a1_minus, a2_plus, a2_minus };
    Kind kind;
    std::vector<std::pair<double, double>> points; // polyline in raw (Delta_1, Delta_2)
};

inline const char* to_string(ResonanceLocus::Kind k) {
    switch (k) {
        case ResonanceLocus::Kind::r1_plus: return "r1+";
        case ResonanceLocus::Kind::r1_minus: return "r1-";
        case ResonanceLocus::Kind::r2_plus: return "r2+";
        case ResonanceLocus::Kind::r2_minus: return "r2-";
        case ResonanceLocus::Kind::a1_plus: return "a1+";
        case ResonanceLocus::Kind::a1_minus: return "a1-";
        case ResonanceLocus::Kind::a2_plus: return "a2+";
        case ResonanceLocus::Kind::a2_minus: return "a2-";
    }
    return "?";
}

namespace detail {

struct Segment {
    std::pair<double, double> a, b;
};

// marching squares with linear interpolation on one scalar field g over the
// stable cells of a sweep grid
inline std::vector<Segment> trace_zero_contour(const SweepGrid& grid,
                                               const std::vector<double>& g) {
    std::vector<Segment> segments;
    auto interp = [](double x0, double x1, double g0, double g1) {
        return x0 + (x1 - x0) * (g0 / (g0 - g1));
    };
    for (int i = 0; i + 1 < grid.n1; ++i) {
        for (int j = 0; j + 1 < grid.n2; ++j) {
            const std::size_t k00 = grid.idx(i, j), k10 = grid.idx(i + 1, j);
            const std::size_t k01 = grid.idx(i, j + 1), k11 = grid.idx(i + 1, j + 1);
            if (!(grid.stable[k00] && grid.stable[k10] && grid.stable[k01] && grid.stable[k11]))
                continue;
            const double g00 = g[k00], g10 = g[k10], g01 = g[k01], g11 = g[k11];
            const double x0 = grid.delta1_axis[i], x1 = grid.delta1_axis[i + 1];
            const double y0 = grid.delta2_axis[j], y1 = grid.delta2_axis[j + 1];

            std::vector<std::pair<double, double>> hits;
            if ((g00 < 0) != (g10 < 0)) hits.push_back({interp(x0, x1, g00, g10), y0});
            if ((g01 < 0) != (g11 < 0)) hits.push_back({interp(x0, x1, g01, g11), y1});
            if ((g00 < 0) != (g01 < 0)) hits.push_back({x0, interp(y0, y1, g00, g01)});
            if ((g10 < 0) != (g11 < 0)) hits.push_back({x1, interp(y0, y1, g10, g11)});

            if (hits.size() == 2) {
                segments.push_back({hits[0], hits[1]});
            } else if (hits.size() == 4) {
                // saddle: pair crossings by the sign at the cell centre
                const double gc = 0.25 * (g00 + g10 + g01 + g11);
                const bool flip = (gc < 0) == (g00 < 0);
                // hits order: bottom, top, left, right
                if (flip) {
                    segments.push_back({hits[0], hits[3]});
                    segments.push_back({hits[2], hits[1]});
                } else {
                    segments.push_back({hits[0], hits[2]});
                    segments.push_back({hits[3], hits[1]});
                }
            }
        }
    }
    return segments;
}

inline std::vector<std::vector<std::pair<double, double>>>
chain_segments(std::vector<Segment> segments) {
    auto key = [](const std::pair<double, double>& pt) {
        return std::pair<long long, long long>(std::llround(pt.first * 1e9),
                                               std::llround(pt.second * 1e9));
    };
    std::multimap<std::pair<long long, long long>, std::size_t> ends;
    for (std::size_t s = 0; s < segments.size(); ++s) {
        ends.insert({key(segments[s].a), s});
        ends.insert({key(segments[s].b), s});
    }
    std::vector<bool> used(segments.size(), false);
    std::vector<std::vector<std::pair<double, double>>> polylines;

    for (std::size_t s = 0; s < segments.size(); ++s) {
        if (used[s]) continue;
        used[s] = true;
        std::vector<std::pair<double, double>> line{segments[s].a, segments[s].b};
        // extend forward from the tail, then backward from the head
        for (int dir = 0; dir < 2; ++dir) {
            bool grew = true;
            while (grew) {
                grew = false;
                const auto endpt = (dir == 0) ? line.back() : line.front();
                auto [lo, hi] = ends.equal_range(key(endpt));
                for (auto it = lo; it != hi; ++it) {
                    const std::size_t cand = it->second;
                    if (used[cand]) continue;
                    used[cand] = true;
                    const auto& seg = segments[cand];
                    const bool from_a = key(seg.a) == key(endpt);
                    const auto next = from_a ? seg.b : seg.a;
                    if (dir == 0)
                        line.push_back(next);
                    else
                        line.insert(line.begin(), next);
                    grew = true;
                    break;
                }
            }
        }
        polylines.push_back(std::move(line));
    }
    return polylines;
}

} // namespace detail

// Resonance loci over a detuning window.  Four conditions (fields 1/2, red
// and blue sidebands) are contoured; each connected polyline becomes one
// ResonanceLocus, branch-labelled by the other field's effective detuning at
// the polyline midpoint.
inline std::vector<ResonanceLocus>
resonance_loci(const ScaledParams& base, std::pair<double, double> d1_range,
               std::pair<double, double> d2_range, std::pair<int, int> resolution,
               int threads = 1) {
    const SweepGrid grid = sweep_map(base, d1_range, d2_range, resolution, threads);
    const std::size_t cells = grid.gamma.size();

    std::vector<double> g(cells);
    std::vector<ResonanceLocus> out;

    struct Condition {
        int field;    // 1 or 2
        double sign;  // +1: red (Delta^x + w = 0), -1: blue (Delta^x - w = 0)
    };
    const Condition conditions[4] = {{1, 1.0}, {1, -1.0}, {2, 1.0}, {2, -1.0}};

    for (const Condition& sp : conditions) {
        for (std::size_t k = 0; k < cells; ++k) {
            const double d = (sp.field == 1) ? grid.d1x[k] : grid.d2x[k];
            g[k] = d + sp.sign * grid.omega_m[k];
        }
        auto kind_of = [&](bool plus) {
            if (sp.field == 1 && sp.sign > 0)
                return plus ? ResonanceLocus::Kind::r1_plus : ResonanceLocus::Kind::r1_minus;
            if (sp.field == 1)
                return plus ? ResonanceLocus::Kind::a1_plus : ResonanceLocus::Kind::a1_minus;
            if (sp.sign > 0)
                return plus ? ResonanceLocus::Kind::r2_plus : ResonanceLocus::Kind::r2_minus;
            return plus ? ResonanceLocus::Kind::a2_plus : ResonanceLocus::Kind::a2_minus;
        };

        auto polylines = detail::chain_segments(detail::trace_zero_contour(grid, g));
        for (auto& line : polylines) {
            if (line.size() < 2) continue;
            // the +- branches of one contour can be connected (they merge where
            // the splitting closes), so label every point by the sign of the
            // other field's effective detuning and split the polyline into
            // constant-sign runs
            std::vector<int> sign(line.size(), 0);
            for (std::size_t i = 0; i < line.size(); ++i) {
                ScaledParams p = base;
                p.delta1 = line[i].first;
                p.delta2 = line[i].second;
                try {
                    const Equilibrium eq = solve_equilibrium_deepest(p);
                    const double other = (sp.field == 1) ? eq.d2x : eq.d1x;
                    sign[i] = (other > 0.0) ? 1 : -1;
                } catch (const SolverError&) {
                    sign[i] = 0;
                }
            }
            std::size_t start = 0;
            while (start < line.size()) {
                if (sign[start] == 0) {
                    ++start;
                    continue;
                }
                std::size_t end = start + 1;
                while (end < line.size() && sign[end] == sign[start]) ++end;
                if (end - start >= 2) {
                    ResonanceLocus locus;
                    locus.kind = kind_of(sign[start] > 0);
                    locus.points.assign(line.begin() + start, line.begin() + end);
                    out.push_back(std::move(locus));
                }
                start = end;
            }
        }
    }
    return out;
}

struct PhasePoint {
    double phi = 0.0;
    double gamma = 0.0;
    bool ok = false;
};

// Gamma(phi) at fixed detunings, re-solving the general-phi force balance per
// point.  Failed points are masked, not fatal.
inline std::vector<PhasePoint> phase_sweep(const ScaledParams& base, double phi_min,
                                           double phi_max, int n) {
    base.validate();
    if (n < 1) throw InvalidParameterError("phase_sweep: need at least one point");
    if (!(phi_min > 0.0 && phi_max < constants::pi / 2.0 && phi_min <= phi_max))
        throw InvalidParameterError("phase_sweep: phi range must lie within (0, pi/2)");
    std::vector<PhasePoint> out(n);
    for (int i = 0; i < n; ++i) {
        const double phi =
            (n == 1) ? phi_min : phi_min + (phi_max - phi_min) * static_cast<double>(i) / (n - 1);
        out[i].phi = phi;
        ScaledParams p = base;
        p.phase = phi;
        try {
            const Equilibrium eq = solve_equilibrium_deepest(p);
            out[i].gamma = cooling_rate(eq, p).gamma;
            out[i].ok = true;
        } catch (const SolverError&) {
        }
    }
    return out;
}

struct PowerPoint {
    double eps2 = 0.0;
    double gamma_sr_full = 0.0; // full theory at sr_detunings
    double gamma_dr_full = 0.0; // full theory at dr_detunings_numeric
    double omega_over_kappa = 0.0; // omega_M/kappa_A at the DR point
    bool sr_ok = false, dr_ok = false;
};

// Full-theory rates along the drive axis at the SR and (numerically refined)
// DR operating points.
inline std::vector<PowerPoint> power_scan(const ScaledParams& base, double eps2_min,
                                          double eps2_max, int n, bool log_spacing = true) {
    base.validate();
    if (!(eps2_min > 0.0 && eps2_max >= eps2_min))
        throw InvalidParameterError("power_scan: need 0 < eps2_min <= eps2_max");
    if (n < 1) throw InvalidParameterError("power_scan: need at least one point");

    std::vector<PowerPoint> out(n);
    for (int i = 0; i < n; ++i) {
        const double f = (n == 1) ? 0.0 : static_cast<double>(i) / (n - 1);
        const double e2 = log_spacing
                              ? eps2_min * std::pow(eps2_max / eps2_min, f)
                              : eps2_min + (eps2_max - eps2_min) * f;
        out[i].eps2 = e2;
        const double eps = std::sqrt(e2);

        try {
            const ResonancePoint sr = sr_detunings(eps, base.kappaA, base.drive_ratio);
            ScaledParams p = base;
            p.eps2 = e2;
            p.delta1 = sr.delta1;
            p.delta2 = sr.delta2;
            const Equilibrium eq = solve_equilibrium_deepest(p);
            out[i].gamma_sr_full = cooling_rate(eq, p).gamma;
            out[i].sr_ok = true;
        } catch (const SolverError&) {
        }
        try {
            const ResonancePoint dr = dr_detunings_numeric(eps, base.kappaA, base.drive_ratio);
            out[i].gamma_dr_full = dr.gamma_predicted;
            out[i].omega_over_kappa = dr.omega_m / base.kappaA;
            out[i].dr_ok = true;
        } catch (const SolverError&) {
        }
    }
    return out;
}

} // namespace selftrap
