#include "effcond/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <string_view>
#include <sstream>

namespace effcond::io {

namespace {

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos)
    return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double as_double(const json &j, const char *what) {
  if (!j.is_number())
    throw ParseError(std::string(what) + " must be a number");
  return j.get<double>();
}

cplx complex_from_json(const json &j) {
  if (j.is_number())
    return {j.get<double>(), 0.0};
  if (j.is_string())
    return parse_complex(j.get<std::string>());
  if (j.is_array() && j.size() == 2)
    return {as_double(j[0], "real part"), as_double(j[1], "imaginary part")};
  throw ParseError("complex entry must be a number, [re, im] or a string");
}

Eigen::MatrixXd matrix_from_json(const json &j, const char *what) {
  if (!j.is_array())
    throw ParseError(std::string(what) + " must be an array of rows");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = 0;
  if (rows > 0) {
    if (!j[0].is_array())
      throw ParseError(std::string(what) + " rows must be arrays");
    cols = static_cast<Eigen::Index>(j[0].size());
  }
  Eigen::MatrixXd M(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<Eigen::Index>(j[r].size()) != cols)
      throw DimensionMismatch(std::string(what) + " is ragged");
    for (Eigen::Index c = 0; c < cols; ++c)
      M(r, c) = as_double(j[r][c], what);
  }
  return M;
}

json matrix_to_json(const Eigen::MatrixXd &M) {
  json out = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c)
      row.push_back(M(r, c));
    out.push_back(row);
  }
  return out;
}

Eigen::VectorXd vector_from_json(const json &j, const char *what) {
  if (!j.is_array())
    throw ParseError(std::string(what) + " must be an array");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = as_double(j[i], what);
  return v;
}

json vector_to_json(const Eigen::VectorXd &v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out.push_back(v[i]);
  return out;
}

void dump_into(const json &j, int indent, int depth, std::string &out) {
  const std::string pad = indent > 0 ? std::string((depth + 1) * indent, ' ') : "";
  const std::string close = indent > 0 ? std::string(depth * indent, ' ') : "";
  const char *nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
  case json::value_t::object: {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += "{";
    out += nl;
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) {
        out += ",";
        out += nl;
      }
      first = false;
      out += pad + json(it.key()).dump() + (indent > 0 ? ": " : ":");
      dump_into(it.value(), indent, depth + 1, out);
    }
    out += nl + close + "}";
    return;
  }
  case json::value_t::array: {
    if (j.empty()) {
      out += "[]";
      return;
    }
    // Arrays of scalars stay on one line.
    bool flat = true;
    for (const json &e : j)
      flat = flat && !e.is_structured();
    out += "[";
    bool first = true;
    for (const json &e : j) {
      if (!first)
        out += flat ? ", " : ",";
      if (!flat) {
        out += nl;
        out += pad;
      }
      first = false;
      dump_into(e, indent, depth + 1, out);
    }
    if (!flat)
      out += nl + close;
    out += "]";
    return;
  }
  case json::value_t::number_float: {
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
      out += "null";
      return;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
    // Keep the value a float on re-parse (this also preserves -0).
    if (std::string_view(buf).find_first_of(".e") == std::string_view::npos)
      out += ".0";
    return;
  }
  default:
    out += j.dump();
  }
}

} // namespace

GridGeometry parse_geometry(const std::string &text, MirrorSpec fallback) {
  const std::string t = trim(text);
  if (t.empty())
    throw ParseError("empty geometry input");
  std::vector<std::vector<int>> raw;
  MirrorSpec mirror = fallback;
  if (t.front() == '{') {
    json j;
    try {
      j = json::parse(t);
    } catch (const json::parse_error &e) {
      throw ParseError(std::string("geometry JSON: ") + e.what());
    }
    if (!j.contains("chi"))
      throw ParseError("geometry JSON needs a chi array");
    for (const json &row : j["chi"]) {
      if (!row.is_array())
        throw ParseError("chi rows must be arrays");
      std::vector<int> r;
      for (const json &v : row) {
        if (!v.is_number_integer())
          throw ParseError("chi entries must be 0 or 1");
        r.push_back(v.get<int>());
      }
      raw.push_back(std::move(r));
    }
    if (j.contains("n") && j["n"].get<int>() != static_cast<int>(raw.size()))
      throw DimensionMismatch("n does not match the number of chi rows");
    if (j.contains("mirror")) {
      const json &m = j["mirror"];
      if (m.is_string() && m.get<std::string>() == "auto")
        mirror = {true, 0};
      else if (m.is_number_integer())
        mirror = {false, m.get<int>()};
      else
        throw ParseError("mirror must be an integer shift or \"auto\"");
    }
  } else {
    std::istringstream in(t);
    std::string line;
    while (std::getline(in, line)) {
      line = trim(line);
      if (line.empty())
        continue;
      std::vector<int> r;
      for (char c : line) {
        if (c == '0' || c == '1')
          r.push_back(c - '0');
        else if (c != ' ' && c != '\t')
          throw ParseError(std::string("unexpected character '") + c + "' in ASCII grid");
      }
      raw.push_back(std::move(r));
    }
  }
  return load_geometry(raw, mirror);
}

GridGeometry read_geometry(const std::string &path, MirrorSpec fallback) {
  return parse_geometry(read_file(path), fallback);
}

json to_json(const GridGeometry &geom) {
  json chi = json::array();
  for (int i = 0; i < geom.n; ++i) {
    json row = json::array();
    for (int j = 0; j < geom.n; ++j)
      row.push_back(geom.at(i, j));
    chi.push_back(row);
  }
  return {{"n", geom.n}, {"mirror", geom.mirror}, {"chi", chi}};
}

cplx parse_complex(const std::string &in) {
  std::string s;
  for (char c : in)
    if (c != ' ' && c != '\t')
      s += c;
  static const std::string num = R"([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)";
  static const std::regex re_only("^(" + num + ")$");
  static const std::regex im_only("^(" + num + ")?[ij]$|^([+-])[ij]$");
  static const std::regex both("^(" + num + ")([+-](?:\\d+\\.?\\d*|\\.\\d+)(?:[eE][+-]?\\d+)?)?([+-])?[ij]$");
  std::smatch m;
  if (std::regex_match(s, m, re_only))
    return {std::stod(m[1]), 0.0};
  if (std::regex_match(s, m, both) && m[1].matched && (m[2].matched || m[3].matched)) {
    const double re = std::stod(m[1]);
    const double im = m[2].matched ? std::stod(m[2]) : (m[3].str() == "-" ? -1.0 : 1.0);
    return {re, im};
  }
  if (std::regex_match(s, m, im_only)) {
    if (m[1].matched)
      return {0.0, std::stod(m[1])};
    if (m[2].matched)
      return {0.0, m[2].str() == "-" ? -1.0 : 1.0};
    return {0.0, 1.0};
  }
  throw ParseError("cannot parse complex number '" + in + "'");
}

Tensor2 parse_tensor(const std::string &s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    parts.push_back(item);
  if (parts.size() != 4)
    throw ParseError("tensor literal needs four comma-separated entries");
  Tensor2 t;
  t << parse_complex(parts[0]), parse_complex(parts[1]), parse_complex(parts[2]),
      parse_complex(parts[3]);
  return t;
}

Tensor2 tensor_from_json(const json &j) {
  if (j.is_string())
    return parse_tensor(j.get<std::string>());
  if (j.is_object() && j.contains("re")) {
    const Eigen::MatrixXd re = matrix_from_json(j["re"], "tensor re");
    const Eigen::MatrixXd im = j.contains("im") ? matrix_from_json(j["im"], "tensor im")
                                                : Eigen::MatrixXd::Zero(2, 2);
    if (re.rows() != 2 || re.cols() != 2 || im.rows() != 2 || im.cols() != 2)
      throw DimensionMismatch("tensor must be 2x2");
    Tensor2 t;
    t.real() = re;
    t.imag() = im;
    return t;
  }
  if (!j.is_array() || j.size() != 2)
    throw DimensionMismatch("tensor must be a 2x2 array");
  Tensor2 t;
  for (int r = 0; r < 2; ++r) {
    if (!j[r].is_array() || j[r].size() != 2)
      throw DimensionMismatch("tensor must be a 2x2 array");
    for (int c = 0; c < 2; ++c)
      t(r, c) = complex_from_json(j[r][c]);
  }
  return t;
}

json to_json(const Tensor2 &t) {
  return {{"re", matrix_to_json(t.real())}, {"im", matrix_to_json(t.imag())}};
}

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json to_json(const CanonicalRep &rep) {
  json j;
  j["half_m"] = rep.half_m;
  j["n1"] = rep.n1;
  j["n2"] = rep.n2;
  j["rho"] = vector_to_json(rep.rho);
  j["beta"] = vector_to_json(rep.beta);
  j["H1"] = matrix_to_json(rep.H1);
  j["H2"] = matrix_to_json(rep.H2);
  if (!rep.perm1.empty())
    j["perm1"] = rep.perm1;
  if (!rep.perm2.empty())
    j["perm2"] = rep.perm2;
  if (rep.compressed) {
    j["compressed"] = true;
    j["Y1"] = matrix_to_json(rep.Y1c);
    j["Y3"] = matrix_to_json(rep.Y3c);
  }
  return j;
}

CanonicalRep rep_from_json(const json &j) {
  for (const char *key : {"half_m", "n1", "n2", "rho", "beta", "H1", "H2"})
    if (!j.contains(key))
      throw ParseError(std::string("rep JSON is missing ") + key);
  CanonicalRep rep;
  rep.half_m = j["half_m"].get<int>();
  rep.n1 = j["n1"].get<int>();
  rep.n2 = j["n2"].get<int>();
  rep.rho = vector_from_json(j["rho"], "rho");
  rep.beta = vector_from_json(j["beta"], "beta");
  const int h = rep.half_m;
  rep.H1 = matrix_from_json(j["H1"], "H1");
  rep.H2 = matrix_from_json(j["H2"], "H2");
  // Empty arrays lose their column count.
  if (rep.H1.size() == 0)
    rep.H1.resize(rep.n1, h - rep.n1);
  if (rep.H2.size() == 0)
    rep.H2.resize(rep.n2, h - rep.n2);
  if (j.contains("perm1"))
    rep.perm1 = j["perm1"].get<std::vector<int>>();
  if (j.contains("perm2"))
    rep.perm2 = j["perm2"].get<std::vector<int>>();
  if (j.value("compressed", false)) {
    rep.compressed = true;
    rep.Y1c = matrix_from_json(j.at("Y1"), "Y1");
    rep.Y3c = matrix_from_json(j.at("Y3"), "Y3");
  }
  if (rep.rho.size() != h || rep.beta.size() != h || rep.H1.rows() != rep.n1 ||
      rep.H1.cols() != h - rep.n1 || rep.H2.rows() != rep.n2 ||
      rep.H2.cols() != h - rep.n2)
    throw DimensionMismatch("rep arrays do not match half_m, n1, n2");
  return rep;
}

LaminateProgram laminate_from_json(const json &j) {
  LaminateProgram p;
  if (!j.contains("sigma0"))
    throw ParseError("laminate program needs sigma0");
  p.sigma0 = tensor_from_json(j["sigma0"]);
  if (j.contains("sigma_ref") && !j["sigma_ref"].is_null())
    p.sigma_ref = as_double(j["sigma_ref"], "sigma_ref");
  if (j.contains("n0")) {
    const Eigen::VectorXd n0 = vector_from_json(j["n0"], "n0");
    if (n0.size() != 2)
      throw DimensionMismatch("n0 must have two entries");
    p.n0 = n0;
  }
  p.rotation0_deg = j.value("rotation0_deg", 0.0);
  for (const json &st : j.value("steps", json::array()))
    p.steps.push_back({as_double(st.at("rotation_deg"), "rotation_deg"),
                       as_double(st.at("fraction"), "fraction")});
  validate(p);
  return p;
}

std::vector<SpectralSample> parse_samples_csv(const std::string &text) {
  std::vector<SpectralSample> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#')
      continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(trim(cell), &used));
        if (used != trim(cell).size())
          numeric = false;
      } catch (const std::exception &) {
        numeric = false;
      }
    }
    if (!numeric && out.empty() && vals.size() < 4)
      continue; // header row
    if (!numeric || vals.size() != 4)
      throw ParseError("sample CSV line " + std::to_string(lineno) +
                       " needs four numeric columns");
    out.push_back({{vals[0], vals[1]}, {vals[2], vals[3]}});
  }
  return out;
}

std::string dump(const json &j, int indent) {
  std::string out;
  dump_into(j, indent, 0, out);
  out += "\n";
  return out;
}

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string &path, const std::string &content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw ParseError("cannot write " + tmp.string());
    out << content;
    if (!out.flush())
      throw ParseError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw ParseError("cannot move output into place: " + ec.message());
  }
}

std::string hash_hex(const std::string &bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string geometry_hash(const GridGeometry &geom) {
  std::string bytes = std::to_string(geom.n) + ":" + std::to_string(geom.mirror) + ":";
  for (std::uint8_t c : geom.chi)
    bytes += static_cast<char>('0' + c);
  return hash_hex(bytes);
}

} // namespace effcond::io
