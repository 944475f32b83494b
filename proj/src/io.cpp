#include "paritysim/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "paritysim/error.hpp"

namespace paritysim {

namespace fs = std::filesystem;

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

fs::path sidecar_path(const fs::path& csv) {
  fs::path p = csv;
  p.replace_extension(".meta.json");
  return p;
}

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
  return in;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const fs::path& path) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::IoError, "bad number '" + s + "' in " + path.string());
}

// Rows after the header, each checked against the expected column count.
std::vector<std::vector<std::string>> read_rows(const fs::path& path, const std::string& header) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw Error(ErrorKind::IoError, path.string() + ": expected header '" + header + "'");
  }
  const std::size_t cols = split(header).size();
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != cols) throw Error(ErrorKind::IoError, path.string() + ": bad row '" + line + "'");
    rows.push_back(std::move(cells));
  }
  return rows;
}

void write_sidecar(const fs::path& csv, Json meta, const Json& extra) {
  meta["file"] = csv.filename().string();
  for (const auto& [k, v] : extra.items()) meta[k] = v;
  write_json(sidecar_path(csv), meta);
}

}  // namespace

void write_json(const fs::path& path, const Json& value) {
  std::ofstream out = open_out(path);
  out << value.dump(2) << '\n';
}

Json read_json(const fs::path& path) {
  std::ifstream in = open_in(path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::IoError, path.string() + ": " + e.what());
  }
}

Json to_json(const PhaseGrid& g) {
  return Json{{"i_min", g.i_min}, {"i_max", g.i_max}, {"ni", g.ni},
              {"q_min", g.q_min}, {"q_max", g.q_max}, {"nq", g.nq}};
}

PhaseGrid grid_from_json(const Json& j) {
  PhaseGrid g;
  g.i_min = j.at("i_min").get<double>();
  g.i_max = j.at("i_max").get<double>();
  g.ni = j.at("ni").get<int>();
  g.q_min = j.at("q_min").get<double>();
  g.q_max = j.at("q_max").get<double>();
  g.nq = j.at("nq").get<int>();
  return g;
}

void write_tomogram(const fs::path& csv, const Tomogram& t, const Json& extra) {
  t.validate();
  std::ofstream out = open_out(csv);
  out << "I,Q,value,shots\n";
  const std::string shots = t.shots ? std::to_string(*t.shots) : "";
  for (std::size_t k = 0; k < t.values.size(); ++k) {
    const ComplexAmplitude a = t.grid.point(k);
    out << format_double(a.real()) << ',' << format_double(a.imag()) << ','
        << format_double(t.values[k]) << ',' << shots << '\n';
  }
  Json meta{{"kind", "tomogram"},
            {"grid", to_json(t.grid)},
            {"eta", t.eta},
            {"f_mm", t.f_mm},
            {"shots", t.shots ? Json(*t.shots) : Json(nullptr)},
            {"seed", t.seed},
            {"forward_model", t.forward_model}};
  if (t.cross_check) {
    meta["cross_check"] = {{"max_abs_difference", t.cross_check->max_abs_difference},
                           {"convolution_normalization", t.cross_check->convolution_normalization},
                           {"kraus_normalization", t.cross_check->kraus_normalization}};
  }
  write_sidecar(csv, std::move(meta), extra);
}

Tomogram read_tomogram(const fs::path& csv) {
  const Json meta = read_json(sidecar_path(csv));
  Tomogram t;
  try {
    t.grid = grid_from_json(meta.at("grid"));
    t.eta = meta.at("eta").get<double>();
    t.f_mm = meta.at("f_mm").get<double>();
    t.seed = meta.at("seed").get<std::uint64_t>();
    if (!meta.at("shots").is_null()) t.shots = meta.at("shots").get<std::size_t>();
    t.forward_model = meta.value("forward_model", std::string(kKrausForwardModel));
    if (meta.contains("cross_check")) {
      const Json& c = meta.at("cross_check");
      t.cross_check = TomogramCrossCheck{c.at("max_abs_difference").get<double>(),
                                         c.at("convolution_normalization").get<double>(),
                                         c.at("kraus_normalization").get<double>()};
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::IoError, sidecar_path(csv).string() + ": " + e.what());
  }
  const auto rows = read_rows(csv, "I,Q,value,shots");
  if (rows.size() != t.grid.size()) throw Error(ErrorKind::IoError, csv.string() + ": row count mismatch");
  for (const auto& r : rows) t.values.push_back(parse_double(r[2], csv));
  t.validate();
  return t;
}

void write_moment_table(const fs::path& csv, const MomentTable& t, const Json& extra) {
  std::ofstream out = open_out(csv);
  out << "n,m,re,im,stderr\n";
  for (const auto& [n, m] : moment_indices(t.order)) {
    const auto it = t.values.find({n, m});
    if (it == t.values.end()) continue;
    const auto se = t.std_errors.find({n, m});
    out << n << ',' << m << ',' << format_double(it->second.real()) << ','
        << format_double(it->second.imag()) << ','
        << format_double(se == t.std_errors.end() ? 0.0 : se->second) << '\n';
  }
  write_sidecar(csv, Json{{"kind", "moment-table"}, {"order", t.order}}, extra);
}

MomentTable read_moment_table(const fs::path& csv) {
  MomentTable t;
  for (const auto& r : read_rows(csv, "n,m,re,im,stderr")) {
    const int n = static_cast<int>(parse_double(r[0], csv));
    const int m = static_cast<int>(parse_double(r[1], csv));
    t.values[{n, m}] = Complex(parse_double(r[2], csv), parse_double(r[3], csv));
    t.std_errors[{n, m}] = parse_double(r[4], csv);
    t.order = std::max(t.order, n + m);
  }
  return t;
}

void write_records(const fs::path& csv, const std::vector<HeterodyneRecord>& records,
                   const Json& extra) {
  std::ofstream out = open_out(csv);
  out << "shot,i,q,qubit_q\n";
  for (const auto& r : records) {
    out << r.shot << ',' << format_double(r.i) << ',' << format_double(r.q) << ','
        << format_double(r.qubit_q) << '\n';
  }
  write_sidecar(csv, Json{{"kind", "heterodyne-records"}, {"count", records.size()}}, extra);
}

std::vector<HeterodyneRecord> read_records(const fs::path& csv) {
  std::vector<HeterodyneRecord> out;
  for (const auto& r : read_rows(csv, "shot,i,q,qubit_q")) {
    HeterodyneRecord rec;
    const auto [ptr, ec] = std::from_chars(r[0].data(), r[0].data() + r[0].size(), rec.shot);
    if (ec != std::errc() || ptr != r[0].data() + r[0].size()) {
      throw Error(ErrorKind::IoError, csv.string() + ": bad shot index '" + r[0] + "'");
    }
    rec.i = parse_double(r[1], csv);
    rec.q = parse_double(r[2], csv);
    rec.qubit_q = parse_double(r[3], csv);
    out.push_back(rec);
  }
  return out;
}

void write_table(const fs::path& csv, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows, const Json& extra) {
  std::ofstream out = open_out(csv);
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw Error(ErrorKind::InvalidArgument, "row width mismatch");
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
    out << '\n';
  }
  write_sidecar(csv, Json{{"kind", "table"}, {"columns", header}}, extra);
}

}  // namespace paritysim
