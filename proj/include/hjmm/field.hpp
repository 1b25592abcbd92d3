#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hjmm/grid.hpp"
#include "hjmm/hamiltonian.hpp"

namespace hjmm {

enum class Method { Minmax, Viscosity, AnalyticExample };

const char* to_string(Method m);

/// |u(t, x) - u(s, x)| <= c_lip |t - s| on consecutive slices, against
/// sup |H| over the momenta the field visits.
struct LipschitzAudit {
    double c_lip = 0.0;
    double sup_h = 0.0;
    double momentum_bound = 0.0;
    double slack = 0.1;
    bool pass = true;
};

/// u sampled on grid x times. In Hopf-bounds mode `values` holds the lower
/// bound and `upper` the upper bound.
struct SolutionField {
    SpaceGrid grid;
    std::vector<double> times;
    std::vector<std::vector<double>> values;  // [time][flat point]
    std::optional<std::vector<std::vector<double>>> upper;
    Method method = Method::Minmax;
    std::map<std::string, double> metadata;
    std::vector<std::string> notes;

    bool bounds() const { return upper.has_value(); }
    const std::vector<double>& slice(std::size_t k) const { return values.at(k); }
    /// Index of an exactly matching time; contract error otherwise.
    std::size_t time_index(double t) const;
    void check_finite() const;
};

/// Decimal with 12 significant digits; negative zero prints as 0.
std::string format_number(double v);

/// Header then one row per (time, point): t,x[,x2],u,method. Bounds fields
/// write a minmax_lower row followed by a minmax_upper row.
void write_csv(std::ostream& os, const SolutionField& field);
void write_csv(std::ostream& os, const std::vector<const SolutionField*>& fields);

LipschitzAudit lipschitz_audit(const SolutionField& field, const HamiltonianSpec& h, double slack = 0.1);

double sup_norm(const std::vector<double>& a, const std::vector<double>& b);
/// max(a - b) - min(a - b).
double oscillation(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace hjmm
