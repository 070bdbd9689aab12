#pragma once

#include <string>

#include "pdren/config.hpp"
#include "pdren/genfun.hpp"
#include "pdren/report.hpp"

namespace pdren {

// Loads a series file as a generating function on the configured radius and
// degree. Throws ParseError, MismatchedDomain or NotSymmetric.
GenFunction load_generating_function(const std::string& path, const RunConfig& cfg);

// The normalization constant: explicit in cfg, otherwise read off s0.
double resolve_c0(const RunConfig& cfg);

// The starting polynomial x - 1 + b y^2 with b matched to the expected lambda.
GenFunction seed_polynomial(int deg, double rho);

// Each command writes its files under cfg.out_dir only after every
// computation has succeeded, then returns the report it wrote.
Report cmd_seed(const RunConfig& cfg);
Report cmd_renorm(const RunConfig& cfg);
Report cmd_fixpoint(const RunConfig& cfg);
Report cmd_spectrum(const RunConfig& cfg);
Report cmd_eigencheck(const RunConfig& cfg);
// The CSV is written even when the orbit scaling cannot be formed.
Report cmd_cascade(const RunConfig& cfg);
Report cmd_mapcheck(const RunConfig& cfg);

// 0 when every comparison passed, 3 otherwise.
int exit_code(const Report& r);

}  // namespace pdren
