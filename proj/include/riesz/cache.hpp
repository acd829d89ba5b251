#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "riesz/spectral.hpp"
#include "riesz/variational.hpp"

namespace riesz {

// Directory from RIESZ_LAB_CACHE, if set (created on demand).
std::optional<std::filesystem::path> cache_dir();

// 64-bit FNV-1a of a canonical description, as 16 hex digits.
std::string cache_hash(const std::string& description);

std::string theta_cache_key(const SpectralWeight& sw, const QuadratureSpec& q);
std::string solution_cache_key(const LatticeProblem& lp);

// Theta table from the cache, or built and stored.
ThetaKernel cached_theta(const SpectralWeight& sw, const QuadratureSpec& q);
// Lattice solution from the cache, or solved and stored (g, value, trace, restarts as JSON).
VariationalSolution cached_solution(const LatticeProblem& lp);

std::string solution_to_json(const VariationalSolution& s);
VariationalSolution solution_from_json(const std::string& text);

}  // namespace riesz
