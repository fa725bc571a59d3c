#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "latticemc/dynamics.hpp"
#include "latticemc/stats.hpp"

namespace latticemc {

struct KineticEnergy {
    double value = 0.0;  ///< time-and-ensemble average of p^2/2M (hbar omega_r)
    double error = 0.0;  ///< standard error over atoms
};

inline KineticEnergy kinetic_energy(std::span<const TrajectoryRecord> records) {
    if (records.empty()) throw Error(Errc::empty_records, "kinetic_energy: no records");
    std::vector<double> per_atom;
    per_atom.reserve(records.size());
    for (const auto& rec : records) {
        if (rec.size() == 0) continue;
        double acc = 0.0;
        for (std::size_t i = 0; i < rec.size(); ++i)
            acc += rec.px[i] * rec.px[i] + rec.pz[i] * rec.pz[i];
        // p^2 / 2M = p^2 with M = 1/2
        per_atom.push_back(acc / static_cast<double>(rec.size()));
    }
    if (per_atom.empty()) throw Error(Errc::empty_records, "kinetic_energy: all records empty");
    KineticEnergy out;
    out.value = mean(per_atom);
    if (per_atom.size() > 1)
        out.error = std::sqrt(variance(per_atom) / static_cast<double>(per_atom.size()));
    return out;
}

}  // namespace latticemc
