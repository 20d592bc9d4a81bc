#pragma once

#include <filesystem>
#include <string>

#include "growthflow/fields.hpp"
#include "growthflow/flow.hpp"
#include "growthflow/serfati.hpp"
#include "growthflow/stability.hpp"

namespace growthflow::io {

/// Shortest round-trip decimal text of a double ("." separator, no locale).
std::string format_double(double v);

/// Columns x,y,omega,area.
void write_field_csv(const std::filesystem::path& path, const VortexParticleField& field);
VortexParticleField read_field_csv(const std::filesystem::path& path);

/// Columns t,track_id,x,y for every `stride`-th stored step.
void write_trajectory_csv(const std::filesystem::path& path, const FlowTrajectorySet& traj, std::size_t stride = 1);

/// JSON array of {scenario, lambda, time, point, lhs, rhs, abs_err}.
std::string serfati_json(const std::string& scenario, const SerfatiResidual& res);
void write_serfati_json(const std::filesystem::path& path, const std::string& scenario, const SerfatiResidual& res);

std::string stability_json(const StabilityReport& r);
/// One row per time: t,eta,L,M,Q,J_norm,J1_norm,aT.
void write_stability_csv(const std::filesystem::path& path, const StabilityReport& r);

/// Writes `text` with LF line endings, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace growthflow::io
