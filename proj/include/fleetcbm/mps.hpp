// Free-format MPS export and `name value` solution import.

#ifndef FLEETCBM_MPS_HPP_
#define FLEETCBM_MPS_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

#include "fleetcbm/milp_model.hpp"

namespace fleetcbm {

class SolutionFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Row and column names are sanitized to the MPS character set (no blanks) and
// kept unique; see docs/mps_format.md for the exact grammar.
std::string export_mps(const MilpModel& model, std::string_view name = "FLEETCBM");

// Column name used for variable `id` in export_mps output.
std::string mps_column_name(const MilpModel& model, std::size_t id);

// Parses `<name> <value>` lines (blank lines and `#` comments ignored).
// Names may be model names or their MPS column names. Variables absent from
// the file are an error. The objective is recomputed from the model; the
// status is kOptimal when the assignment is feasible within `tol`, otherwise
// SolutionFormatError names the worst violation.
MilpSolution import_solution(std::string_view text, const MilpModel& model, double tol = 1e-6);

}  // namespace fleetcbm

#endif  // FLEETCBM_MPS_HPP_
