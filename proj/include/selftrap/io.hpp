#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "selftrap/simulator.hpp"
#include "selftrap/sweep.hpp"

namespace selftrap {

// All text output carries 17 significant digits so values round-trip exactly.
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

inline void write_sweep_csv(std::ostream& os, const SweepGrid& grid) {
    os << "delta1,delta2,d1x,d2x,x0,omegaM,gamma,nmin,stable\n";
    for (int i1 = 0; i1 < grid.n1; ++i1) {
        for (int i2 = 0; i2 < grid.n2; ++i2) {
            const std::size_t k = grid.idx(i1, i2);
            os << fmt(grid.delta1_axis[i1]) << ',' << fmt(grid.delta2_axis[i2]) << ','
               << fmt(grid.d1x[k]) << ',' << fmt(grid.d2x[k]) << ',' << fmt(grid.x0[k]) << ','
               << fmt(grid.omega_m[k]) << ',' << fmt(grid.gamma[k]) << ',' << fmt(grid.nmin[k])
               << ',' << int(grid.stable[k]) << '\n';
        }
    }
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "t,x,p,re_a1,im_a1,re_a2,im_a2,energy\n";
    const bool has_energy = traj.energy.size() == traj.states.size();
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const SimState& s = traj.states[i];
        os << fmt(traj.times[i]) << ',' << fmt(s.x) << ',' << fmt(s.p) << ','
           << fmt(s.a1.real()) << ',' << fmt(s.a1.imag()) << ',' << fmt(s.a2.real()) << ','
           << fmt(s.a2.imag()) << ','
           << fmt(has_energy ? traj.energy[i] : std::numeric_limits<double>::quiet_NaN())
           << '\n';
    }
}

inline void write_loci_csv(std::ostream& os, const std::vector<ResonanceLocus>& loci) {
    os << "kind,segment,delta1,delta2\n";
    int seg = 0;
    for (const ResonanceLocus& locus : loci) {
        for (const auto& [d1, d2] : locus.points)
            os << to_string(locus.kind) << ',' << seg << ',' << fmt(d1) << ',' << fmt(d2) << '\n';
        ++seg;
    }
}

inline void write_phase_csv(std::ostream& os, const std::vector<PhasePoint>& pts) {
    os << "phi,gamma,ok\n";
    for (const PhasePoint& pt : pts)
        os << fmt(pt.phi) << ',' << fmt(pt.gamma) << ',' << int(pt.ok) << '\n';
}

inline void write_power_csv(std::ostream& os, const std::vector<PowerPoint>& pts) {
    os << "eps2,gamma_sr,gamma_dr,omegaM_over_kappaA,sr_ok,dr_ok\n";
    for (const PowerPoint& pt : pts)
        os << fmt(pt.eps2) << ',' << fmt(pt.gamma_sr_full) << ',' << fmt(pt.gamma_dr_full) << ','
           << fmt(pt.omega_over_kappa) << ',' << int(pt.sr_ok) << ',' << int(pt.dr_ok) << '\n';
}

} // namespace selftrap
