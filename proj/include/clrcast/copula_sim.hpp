#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clrcast/copula_estimation.hpp"

namespace clrcast {

enum class Family { gaussian, student_t, gumbel, clayton, frank, frechet, independence };

const char* family_name(Family f);
Family parse_family(const std::string& s);

/// Parameters by family: gaussian {rho}; student_t {nu, rho}; gumbel,
/// clayton, frank {theta}; frechet {p, q} with comonotone weight q and
/// countermonotone weight p; independence {}.
struct CopulaSpec {
    Family family = Family::independence;
    std::vector<double> params;
    std::uint64_t seed = 0;
};

void validate(const CopulaSpec& spec);

/// n pairs in (0,1)^2; identical spec and seed give identical output.
std::vector<Point2> sample(const CopulaSpec& spec, int n);

/// Closed-form (lambda_U, lambda_L); threshold is left at zero.
TdcPair true_tdc(const CopulaSpec& spec);

struct ScenarioSegment {
    int n = 0;       // observations per period
    int periods = 1;
    CopulaSpec spec;  // seed field ignored; periods draw from the scenario seed
};

struct DynamicScenario {
    std::vector<ScenarioSegment> segments;
    std::uint64_t seed = 0;
};

/// Sub-seed of period t: splitmix64(splitmix64(seed) + t).
std::uint64_t period_seed(std::uint64_t seed, std::uint64_t t);

/// One vector of raw pairs per period, in scenario order.
std::vector<std::vector<Point2>> generate_scenario(const DynamicScenario& scenario);

}  // namespace clrcast
