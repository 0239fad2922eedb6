#include "chblend/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "chblend/assembly.hpp"
#include "chblend/errors.hpp"
#include "chblend/expr.hpp"
#include "chblend/stepper.hpp"

namespace chblend {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

/// Drops a trailing comment, ignoring '#' inside quotes.
std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (quoted && line[i] == '\\') {
      ++i;
    } else if (line[i] == '"') {
      quoted = !quoted;
    } else if (line[i] == '#' && !quoted) {
      return line.substr(0, i);
    }
  }
  return line;
}

std::string unquote(std::string_view value, std::string_view key, std::size_t line) {
  value = trim(value);
  if (value.empty() || value.front() != '"') return std::string(value);
  std::string out;
  std::size_t i = 1;
  for (; i < value.size(); ++i) {
    const char c = value[i];
    if (c == '\\' && i + 1 < value.size()) {
      out += value[++i];
    } else if (c == '"') {
      break;
    } else {
      out += c;
    }
  }
  if (i >= value.size()) throw ConfigError(std::string(key), line, "unterminated string");
  if (!trim(value.substr(i + 1)).empty())
    throw ConfigError(std::string(key), line, "unexpected text after closing quote");
  return out;
}

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_list(std::string_view value, std::string_view key, std::size_t line) {
  std::vector<std::string> items;
  value = trim(value);
  if (value.empty()) return items;
  bool quoted = false;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= value.size(); ++i) {
    if (i < value.size() && quoted && value[i] == '\\') {
      ++i;
      continue;
    }
    if (i < value.size() && value[i] == '"') quoted = !quoted;
    if (i == value.size() || (value[i] == ',' && !quoted)) {
      const auto item = trim(value.substr(start, i - start));
      if (item.empty()) throw ConfigError(std::string(key), line, "empty list item");
      items.push_back(unquote(item, key, line));
      start = i + 1;
    }
  }
  return items;
}

double parse_real(std::string_view text, std::string_view key, std::size_t line) {
  text = trim(text);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (text.empty() || res.ec != std::errc() || res.ptr != end || !std::isfinite(value))
    throw ConfigError(std::string(key), line, "expected a real number, got '" + std::string(text) + "'");
  return value;
}

long long parse_integer(std::string_view text, std::string_view key, std::size_t line) {
  text = trim(text);
  long long value = 0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (text.empty() || res.ec != std::errc() || res.ptr != end)
    throw ConfigError(std::string(key), line, "expected an integer, got '" + std::string(text) + "'");
  return value;
}

std::size_t parse_count(std::string_view text, std::string_view key, std::size_t line) {
  const long long v = parse_integer(text, key, line);
  if (v < 1) throw ConfigError(std::string(key), line, "must be >= 1");
  return static_cast<std::size_t>(v);
}

const std::set<std::string, std::less<>> kFields{"u", "v", "w_u", "w_v"};

SnapshotFormat parse_format(std::string_view s, std::string_view key, std::size_t line) {
  if (s == "csv") return SnapshotFormat::Csv;
  if (s == "vtk") return SnapshotFormat::Vtk;
  throw ConfigError(std::string(key), line, "unknown snapshot format '" + std::string(s) + "'");
}

const char* format_name(SnapshotFormat f) { return f == SnapshotFormat::Csv ? "csv" : "vtk"; }

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IOError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IOError("cannot open '" + path.string() + "'");
  return in;
}

std::vector<double> parse_csv_row(const std::string& line, std::size_t expected,
                                  const std::filesystem::path& path) {
  std::vector<double> row;
  std::size_t start = 0;
  while (start <= line.size()) {
    const auto comma = line.find(',', start);
    const auto cell = trim(std::string_view(line).substr(
        start, comma == std::string::npos ? std::string::npos : comma - start));
    double value = 0.0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size())
      throw IOError("malformed number '" + std::string(cell) + "' in " + path.string());
    row.push_back(value);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (row.size() != expected)
    throw IOError("expected " + std::to_string(expected) + " columns in " + path.string());
  return row;
}

}  // namespace

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void apply_setting(RunConfig& c, std::string_view key_in, std::string_view value,
                   std::size_t line) {
  const std::string key(trim(key_in));
  Params& p = c.params;
  const auto real = [&] { return parse_real(unquote(value, key, line), key, line); };
  const auto text = [&] { return unquote(value, key, line); };

  if (key == "x_min") c.domain.x_min = real();
  else if (key == "x_max") c.domain.x_max = real();
  else if (key == "y_min") c.domain.y_min = real();
  else if (key == "y_max") c.domain.y_max = real();
  else if (key == "nx") c.nx = parse_count(text(), key, line);
  else if (key == "ny") c.ny = parse_count(text(), key, line);
  else if (key == "tau_u") p.tau_u = real();
  else if (key == "tau_v") p.tau_v = real();
  else if (key == "eps_u") p.eps_u = real();
  else if (key == "eps_v") p.eps_v = real();
  else if (key == "alpha") p.alpha = real();
  else if (key == "beta") p.beta = real();
  else if (key == "sigma") p.sigma = real();
  else if (key == "dt") p.dt = real();
  else if (key == "t_end") p.t_end = real();
  else if (key == "stab") p.stab = real();
  else if (key == "solver_tol") p.solver_tol = real();
  else if (key == "blowup_threshold") p.blowup_threshold = real();
  else if (key == "solver_max_iter") {
    const long long v = parse_integer(text(), key, line);
    if (v < 0 || v > 1000000) throw ConfigError(key, line, "out of range");
    p.solver_max_iter = static_cast<int>(v);
  } else if (key == "v_bar") {
    const std::string v = text();
    if (v == "v0_mean") {
      c.v_bar_from_v0 = true;
    } else {
      c.v_bar_from_v0 = false;
      p.v_bar = parse_real(v, key, line);
    }
  } else if (key == "scheme") {
    try {
      p.scheme = parse_scheme(text());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(key, line, e.what());
    }
  } else if (key == "linear_solver") {
    try {
      p.linear_solver = parse_linear_solver(text());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(key, line, e.what());
    }
  } else if (key == "u0" || key == "v0") {
    std::string expr = text();
    try {
      (void)Expr::parse(expr);
    } catch (const ParseError& e) {
      throw ConfigError(key, line, std::string("invalid expression: ") + e.what());
    }
    (key == "u0" ? c.u0 : c.v0) = std::move(expr);
  } else if (key == "snapshot_times") {
    c.snapshot_times.clear();
    for (const auto& item : split_list(value, key, line))
      c.snapshot_times.push_back(parse_real(item, key, line));
  } else if (key == "snapshot_fields") {
    auto fields = split_list(value, key, line);
    for (const auto& f : fields)
      if (!kFields.contains(f)) throw ConfigError(key, line, "unknown field '" + f + "'");
    c.snapshot_fields = std::move(fields);
  } else if (key == "snapshot_format") {
    c.snapshot_formats.clear();
    for (const auto& item : split_list(value, key, line))
      c.snapshot_formats.push_back(parse_format(item, key, line));
  } else if (key == "series_every") {
    c.series_every = parse_count(text(), key, line);
  } else if (key == "output_dir") {
    c.output_dir = text();
  } else if (key.starts_with("tag.") && key.size() > 4) {
    c.tags[key.substr(4)] = text();
  } else {
    throw ConfigError(key, line, "unknown key");
  }
}

RunConfig parse_config(std::string_view text) {
  RunConfig config;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    const auto raw = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    ++line_no;
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

    const auto line = trim(strip_comment(raw));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("", line_no, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ConfigError("", line_no, "missing key");
    if (!seen.insert(key).second) throw ConfigError(key, line_no, "duplicate key");
    apply_setting(config, key, line.substr(eq + 1), line_no);
  }
  config.validate();
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void RunConfig::validate() const {
  if (!domain.valid()) throw ConfigError("x_min", 0, "domain must satisfy x_min < x_max, y_min < y_max");
  params.validate();
  if (series_every < 1) throw ConfigError("series_every", 0, "must be >= 1");
  for (double t : snapshot_times) {
    if (t < 0.0 || t > params.t_end * (1.0 + 1e-12))
      throw ConfigError("snapshot_times", 0, "time " + format_real(t) + " outside [0, t_end]");
    const double k = std::round(t / params.dt);
    if (std::abs(k * params.dt - t) > 1e-9 * std::max(1.0, t))
      throw ConfigError("snapshot_times", 0, "time " + format_real(t) + " is not on the step grid");
  }
  for (const auto* e : {&u0, &v0}) {
    try {
      (void)Expr::parse(*e);
    } catch (const ParseError& err) {
      throw ConfigError(e == &u0 ? "u0" : "v0", 0, err.what());
    }
  }
}

std::string dump_config(const RunConfig& c) {
  const Params& p = c.params;
  std::ostringstream out;
  const auto put = [&](std::string_view key, const std::string& value) {
    out << key << " = " << value << '\n';
  };
  const auto join = [](const auto& items, auto&& fmt) {
    std::string s;
    for (const auto& item : items) {
      if (!s.empty()) s += ", ";
      s += fmt(item);
    }
    return s;
  };
  put("x_min", format_real(c.domain.x_min));
  put("x_max", format_real(c.domain.x_max));
  put("y_min", format_real(c.domain.y_min));
  put("y_max", format_real(c.domain.y_max));
  put("nx", std::to_string(c.nx));
  put("ny", std::to_string(c.ny));
  put("tau_u", format_real(p.tau_u));
  put("tau_v", format_real(p.tau_v));
  put("eps_u", format_real(p.eps_u));
  put("eps_v", format_real(p.eps_v));
  put("alpha", format_real(p.alpha));
  put("beta", format_real(p.beta));
  put("sigma", format_real(p.sigma));
  put("v_bar", c.v_bar_from_v0 ? std::string("v0_mean") : format_real(p.v_bar));
  put("dt", format_real(p.dt));
  put("t_end", format_real(p.t_end));
  put("scheme", to_string(p.scheme));
  put("stab", format_real(p.stab));
  put("solver_tol", format_real(p.solver_tol));
  put("solver_max_iter", std::to_string(p.solver_max_iter));
  put("linear_solver", to_string(p.linear_solver));
  put("blowup_threshold", format_real(p.blowup_threshold));
  put("u0", quote(c.u0));
  put("v0", quote(c.v0));
  put("snapshot_times", join(c.snapshot_times, format_real));
  put("snapshot_fields", join(c.snapshot_fields, [](const std::string& s) { return s; }));
  put("snapshot_format",
      join(c.snapshot_formats, [](SnapshotFormat f) { return std::string(format_name(f)); }));
  put("series_every", std::to_string(c.series_every));
  if (!c.output_dir.empty()) put("output_dir", quote(c.output_dir));
  for (const auto& [name, value] : c.tags) put("tag." + name, quote(value));
  return out.str();
}

Params effective_params(const RunConfig& config, const Mesh& mesh) {
  Params p = config.params;
  if (config.v_bar_from_v0) {
    const Expr v0 = Expr::parse(config.v0);
    NodalField v(mesh.num_vertices());
    for (std::size_t i = 0; i < v.size(); ++i)
      v[i] = v0.eval(mesh.vertices()[i].x, mesh.vertices()[i].y);
    p.v_bar = mass(mass_matrix(mesh), v) / mesh.area();
  }
  return p;
}

void write_series(const TimeSeries& records, const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  out << kSeriesHeader << '\n';
  for (const auto& r : records) {
    out << format_real(r.t) << ',' << format_real(r.mass_u) << ',' << format_real(r.mass_v) << ','
        << format_real(r.energy) << ',' << format_real(r.energy_nonlocal) << ','
        << format_real(r.u_min) << ',' << format_real(r.u_max) << ',' << format_real(r.v_min)
        << ',' << format_real(r.v_max) << '\n';
  }
  if (!out) throw IOError("failed writing '" + path.string() + "'");
}

TimeSeries read_series(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line) || trim(line) != kSeriesHeader)
    throw IOError("missing series header in " + path.string());
  TimeSeries out;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto v = parse_csv_row(line, 9, path);
    out.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8]});
  }
  return out;
}

Snapshot take_snapshot(const State& state, std::string_view field) {
  Snapshot s;
  s.t = state.t;
  s.field = std::string(field);
  if (field == "u") s.values = state.u;
  else if (field == "v") s.values = state.v;
  else if (field == "w_u") s.values = state.w_u;
  else if (field == "w_v") s.values = state.w_v;
  else throw std::invalid_argument("unknown field '" + std::string(field) + "'");
  return s;
}

void write_snapshot(const Snapshot& s, const Mesh& mesh, SnapshotFormat format,
                    const std::filesystem::path& path) {
  const auto& verts = mesh.vertices();
  if (s.values.size() != verts.size())
    throw std::invalid_argument("write_snapshot: field does not match the mesh");
  std::ofstream out = open_output(path);
  if (format == SnapshotFormat::Csv) {
    out << "x,y,value\n";
    for (std::size_t i = 0; i < verts.size(); ++i)
      out << format_real(verts[i].x) << ',' << format_real(verts[i].y) << ','
          << format_real(s.values[i]) << '\n';
  } else {
    const auto& tris = mesh.triangles();
    out << "# vtk DataFile Version 3.0\n"
        << "chblend " << s.field << " t=" << format_real(s.t) << '\n'
        << "ASCII\n"
        << "DATASET UNSTRUCTURED_GRID\n"
        << "POINTS " << verts.size() << " double\n";
    for (const auto& p : verts) out << format_real(p.x) << ' ' << format_real(p.y) << " 0\n";
    out << "CELLS " << tris.size() << ' ' << 4 * tris.size() << '\n';
    for (const auto& t : tris) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    out << "CELL_TYPES " << tris.size() << '\n';
    for (std::size_t i = 0; i < tris.size(); ++i) out << "5\n";
    out << "POINT_DATA " << verts.size() << '\n'
        << "SCALARS " << s.field << " double 1\n"
        << "LOOKUP_TABLE default\n";
    for (double v : s.values) out << format_real(v) << '\n';
  }
  if (!out) throw IOError("failed writing '" + path.string() + "'");
}

std::vector<SnapshotRow> read_snapshot_csv(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line) || trim(line) != "x,y,value")
    throw IOError("missing snapshot header in " + path.string());
  std::vector<SnapshotRow> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto v = parse_csv_row(line, 3, path);
    rows.push_back({v[0], v[1], v[2]});
  }
  return rows;
}

std::string snapshot_filename(const Snapshot& s, SnapshotFormat format) {
  char t[40];
  std::snprintf(t, sizeof t, "%.10g", s.t);
  return "snapshot_" + s.field + "_t" + t + "." + format_name(format);
}

}  // namespace chblend
