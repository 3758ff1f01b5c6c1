#include "magblock/output.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "magblock/config.hpp"

namespace magblock {

using nlohmann::json;

DataFormat format_from_name(std::string_view name) {
  if (name == "csv") return DataFormat::csv;
  if (name == "ndjson") return DataFormat::ndjson;
  throw InvalidParameter("unknown data format \"" + std::string(name) + "\"");
}

std::string_view extension(DataFormat f) { return f == DataFormat::csv ? "csv" : "ndjson"; }

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> data_columns(const SweepSpec& spec) {
  std::vector<std::string> cols;
  for (const Axis& a : spec.axes) cols.emplace_back(axis_column(a.param));
  for (const char* c : {"g2", "mean_number", "cutoff_used", "status"}) cols.emplace_back(c);
  return cols;
}

void write_csv(std::ostream& os, const SweepResult& r) {
  const auto cols = data_columns(r.spec);
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const SweepPoint& pt : r.points) {
    for (std::size_t a = 0; a < r.spec.axes.size(); ++a) os << format_double(pt.coords[a]) << ',';
    if (pt.status == PointStatus::ok) {
      os << format_double(pt.g2) << ',' << format_double(pt.mean_number) << ','
         << pt.cutoff_used << ',';
    } else {
      os << ",,,";
    }
    os << to_string(pt.status) << '\n';
  }
}

void write_ndjson(std::ostream& os, const SweepResult& r) {
  for (const SweepPoint& pt : r.points) {
    json j = json::object();
    for (std::size_t a = 0; a < r.spec.axes.size(); ++a) {
      j[std::string(axis_column(r.spec.axes[a].param))] = pt.coords[a];
    }
    if (pt.status == PointStatus::ok) {
      j["g2"] = pt.g2;
      j["mean_number"] = pt.mean_number;
      j["cutoff_used"] = pt.cutoff_used;
      j[r.spec.solver == SolverKind::deterministic ? "solver_residual" : "g2_stderr"] =
          pt.uncertainty;
    } else {
      j["g2"] = nullptr;
      j["mean_number"] = nullptr;
      j["cutoff_used"] = nullptr;
      j["message"] = pt.message;
    }
    j["status"] = std::string(to_string(pt.status));
    os << j.dump() << '\n';
  }
}

void write_data(std::ostream& os, const SweepResult& r, DataFormat f) {
  if (f == DataFormat::csv) {
    write_csv(os, r);
  } else {
    write_ndjson(os, r);
  }
}

CsvTable read_csv(std::istream& is) {
  auto split = [](const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
  };
  CsvTable t;
  std::string line;
  if (!std::getline(is, line)) throw InvalidParameter("empty CSV");
  t.header = split(line);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto row = split(line);
    if (row.size() != t.header.size()) {
      throw InvalidParameter("CSV row has " + std::to_string(row.size()) + " fields, expected " +
                             std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

json provenance_json(const SweepResult& r, const std::string& data_file,
                     const std::string& figure, const std::string& curve) {
  const Provenance& p = r.provenance;
  json prov{{"spec_hash", p.spec_hash},
            {"code_version", p.code_version},
            {"timestamp", p.timestamp},
            {"seed", p.seed},
            {"rng_algorithm", p.rng_algorithm},
            {"data_file", data_file},
            {"columns", data_columns(r.spec)},
            {"units", "rates and detunings in units of gamma = 2 pi x 1 MHz"}};
  if (!figure.empty()) {
    prov["figure"] = figure;
    prov["curve"] = curve;
    prov["axis_ranges"] = "chosen defaults; the figure does not fix axis extents";
  }
  return json{{"provenance", prov}, {"spec", to_json(r.spec)}};
}

WrittenCurve write_result(const std::filesystem::path& dir, const std::string& stem,
                          const SweepResult& r, DataFormat f, const std::string& figure,
                          const std::string& curve) {
  std::filesystem::create_directories(dir);
  WrittenCurve w;
  w.data_file = dir / (stem + "." + std::string(extension(f)));
  w.sidecar = dir / (stem + ".provenance.json");
  w.spec = r.spec;
  w.label = curve.empty() ? stem : curve;
  {
    std::ofstream out(w.data_file, std::ios::binary);
    if (!out) throw Error("cannot write " + w.data_file.string());
    write_data(out, r, f);
    if (!out) throw Error("write failed for " + w.data_file.string());
  }
  {
    std::ofstream out(w.sidecar, std::ios::binary);
    if (!out) throw Error("cannot write " + w.sidecar.string());
    out << provenance_json(r, w.data_file.filename().string(), figure, curve).dump(2) << '\n';
    if (!out) throw Error("write failed for " + w.sidecar.string());
  }
  return w;
}

std::string gnuplot_script(const std::string& title, const std::vector<WrittenCurve>& curves) {
  std::ostringstream gp;
  gp << "# gnuplot script; run with: gnuplot -p " << title << ".gp\n";
  gp << "set datafile separator ','\n";
  gp << "set title '" << title << "' noenhanced\n";
  if (curves.empty()) return gp.str();
  const SweepSpec& first = curves.front().spec;
  const Axis& x = first.axes.front();
  gp << "set xlabel '" << axis_column(x.param) << "' noenhanced\n";
  if (x.spacing == Spacing::log) gp << "set logscale x\n";
  if (first.axes.size() == 2) {
    const Axis& y = first.axes[1];
    gp << "set ylabel '" << axis_column(y.param) << "' noenhanced\n";
    if (y.spacing == Spacing::log) gp << "set logscale y\n";
    gp << "set cblabel 'log10 g2'\n";
    gp << "set view map\n";
    for (const auto& c : curves) {
      gp << "splot '" << c.data_file.filename().string()
         << "' skip 1 using 1:2:(log10($3)) with points pointtype 5 pointsize 0.5 palette"
         << " title '" << c.label << "' noenhanced\n";
    }
  } else {
    gp << "set ylabel 'g2(0)'\n";
    gp << "set logscale y\n";
    gp << "plot ";
    for (std::size_t i = 0; i < curves.size(); ++i) {
      gp << (i ? ", \\\n     " : "") << "'" << curves[i].data_file.filename().string()
         << "' skip 1 using 1:2 with lines title '" << curves[i].label << "' noenhanced";
    }
    gp << '\n';
  }
  return gp.str();
}

}  // namespace magblock
