#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "betaint/ensembles.hpp"

namespace betaint {

// Sample batch export: one matrix per row, column-major entries, the beta
// real components of each entry consecutive (w, x, y, z naming).
inline void write_samples_csv(std::ostream& os, const EnsembleSpec& spec,
                              const std::vector<HermitianMatrix>& draws) {
    os.precision(17);
    const int p = spec.p, beta = spec.beta;
    static const char* comp_names[4] = {"w", "x", "y", "z"};
    bool first = true;
    for (int j = 0; j < p; ++j)
        for (int i = 0; i < p; ++i)
            for (int k = 0; k < beta; ++k) {
                os << (first ? "" : ",") << "e" << i << j << "_" << comp_names[k];
                first = false;
            }
    os << "\n";
    for (const HermitianMatrix& x : draws) {
        first = true;
        for (int j = 0; j < p; ++j)
            for (int i = 0; i < p; ++i) {
                Quat q = x.at(i, j);
                double comps[4] = {q.w, q.x, q.y, q.z};
                for (int k = 0; k < beta; ++k) {
                    os << (first ? "" : ",") << comps[k];
                    first = false;
                }
            }
        os << "\n";
    }
}

// Manifest echoing the spec, seed and batch bookkeeping. Deliberately free
// of timestamps so repeated runs are byte-identical.
inline nlohmann::json sample_manifest(const EnsembleSpec& spec, std::uint64_t seed, int workers,
                                      std::size_t count, double acceptance_rate) {
    nlohmann::json manifest;
    manifest["schema_version"] = 1;
    manifest["ensemble"] = ensemble_name(spec.kind);
    manifest["p"] = spec.p;
    manifest["beta"] = spec.beta;
    nlohmann::json params;
    params["n"] = spec.n;
    params["nu"] = spec.nu;
    params["alpha1"] = spec.alpha1;
    params["alpha2"] = spec.alpha2;
    auto add_mat = [&params](const char* key, const MatrixParam& m) {
        if (!m.is_set()) return;
        if (m.is_scalar()) params[key] = m.scalar();
        else params[key] = m.eigenvalues();
    };
    add_mat("sigma", spec.sigma);
    add_mat("theta", spec.theta);
    add_mat("omega", spec.omega);
    add_mat("psi", spec.psi);
    manifest["params"] = params;
    manifest["seed"] = seed;
    manifest["workers"] = workers;
    manifest["count"] = count;
    manifest["acceptance_rate"] = acceptance_rate;
    return manifest;
}

}  // namespace betaint
