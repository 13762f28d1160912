#pragma once

#include <ostream>
#include <string>

#include "json.hpp"

#include "ksnd/admissibility.hpp"
#include "ksnd/energy.hpp"
#include "ksnd/oracles.hpp"
#include "ksnd/probes.hpp"
#include "ksnd/uniqueness.hpp"

namespace ksnd::cli {

inline constexpr const char* timeseries_schema = "# ksnd-timeseries v1";

/// CSV time series: a schema comment line, a column line, then one row per
/// sample. Columns: time, E, T, W, U, E_X, rho_l1, l2_<j> per orbital,
/// x<k>, y<k>, z<k> per nucleus, then vx<k>, vy<k>, vz<k> per nucleus.
class TimeSeriesWriter {
 public:
  TimeSeriesWriter(std::ostream& out, std::size_t n_orbitals, std::size_t n_nuclei);
  /// Writes one row and returns its values in column order. Throws
  /// NonFiniteError (and writes nothing) if any value is NaN/Inf.
  std::vector<double> row(double time, const OrbitalSet& psi, const NuclearState& nuc, const Physics& physics);

 private:
  std::ostream& out_;
  std::size_t n_orbitals_;
  std::size_t n_nuclei_;
};

/// %.17g
std::string format_real(double x);

nlohmann::json to_json(const SplitSample& s);
nlohmann::json to_json(const InequalityResult& r);
nlohmann::json to_json(const ProbeReport& r);
nlohmann::json to_json(const ThresholdSweep& s);
nlohmann::json to_json(const PropagatorNormReport& r);
nlohmann::json to_json(const AdmissibilityReport& r);
nlohmann::json to_json(const UniquenessReport& r);
nlohmann::json to_json(const OracleResult& r);
nlohmann::json to_json(const FixedPointReport& r);
nlohmann::json to_json(const ContractionReport& r);

/// Throws NonFiniteError if the document holds a non-finite number.
void require_finite_json(const nlohmann::json& j);
/// Writes pretty JSON; throws IoError on failure.
void write_json(const nlohmann::json& j, const std::string& path);

}  // namespace ksnd::cli
