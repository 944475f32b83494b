#pragma once

// CSV formats for tomograms, moment tables and heterodyne records. Every file
// is paired with a JSON sidecar `<name>.meta.json` holding the parameters and
// seed that produced it. Numbers are printed with %.17g so they round-trip.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "paritysim/heterodyne.hpp"
#include "paritysim/tomography.hpp"

namespace paritysim {

using Json = nlohmann::ordered_json;

/// Shortest text that parses back to the same double (%.17g).
std::string format_double(double x);

std::filesystem::path sidecar_path(const std::filesystem::path& csv);

/// Writes pretty-printed JSON with a trailing newline; throws IoError.
void write_json(const std::filesystem::path& path, const Json& value);
Json read_json(const std::filesystem::path& path);

Json to_json(const PhaseGrid& grid);
PhaseGrid grid_from_json(const Json& j);

/// `I,Q,value,shots` (shots empty when noiseless) plus sidecar with grid, eta,
/// f_mm, seed, forward model and any cross-check, merged with `extra`.
void write_tomogram(const std::filesystem::path& csv, const Tomogram& t, const Json& extra = Json::object());
Tomogram read_tomogram(const std::filesystem::path& csv);

/// `n,m,re,im,stderr`
void write_moment_table(const std::filesystem::path& csv, const MomentTable& t,
                        const Json& extra = Json::object());
MomentTable read_moment_table(const std::filesystem::path& csv);

/// `shot,i,q,qubit_q`
void write_records(const std::filesystem::path& csv, const std::vector<HeterodyneRecord>& records,
                   const Json& extra = Json::object());
std::vector<HeterodyneRecord> read_records(const std::filesystem::path& csv);

/// Generic long-format table: header plus rows of numbers.
void write_table(const std::filesystem::path& csv, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows, const Json& extra = Json::object());

}  // namespace paritysim
