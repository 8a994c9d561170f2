#include "serialization.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace wellround::io {

double round_sig(double x) {
  if (!std::isfinite(x)) return x;
  if (x == 0.0) return 0.0;  // fold -0.0
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return std::strtod(buf, nullptr);
}

json num(double x) { return json(round_sig(x)); }

json vec(const Eigen::VectorXd& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(num(v(i)));
  return out;
}

json mat(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(num(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse_error, std::string("invalid JSON: ") + e.what());
  }
}

namespace {

double json_num(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return 1e300;
    if (s == "-inf") return -1e300;
  }
  fail(ErrorCode::parse_error, "expected a number");
}

Eigen::VectorXd json_vec(const json& j, int expected = -1) {
  require(j.is_array(), ErrorCode::parse_error, "expected an array");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<int>(i)) = json_num(j[i]);
  require(expected < 0 || v.size() == expected, ErrorCode::parse_error,
          "array has unexpected length");
  return v;
}

Eigen::MatrixXd json_mat(const json& j) {
  require(j.is_array() && !j.empty(), ErrorCode::parse_error, "expected a matrix");
  const auto cols = j[0].size();
  Eigen::MatrixXd m(j.size(), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    require(j[i].is_array() && j[i].size() == cols, ErrorCode::parse_error, "ragged matrix");
    for (std::size_t c = 0; c < cols; ++c) m(static_cast<int>(i), static_cast<int>(c)) = json_num(j[i][c]);
  }
  return m;
}

}  // namespace

Lattice lattice_from_json(const json& j) {
  require(j.is_object() && j.contains("dim") && j.contains("basis"), ErrorCode::parse_error,
          "lattice file needs {dim, basis}");
  const int n = j["dim"].get<int>();
  const Eigen::MatrixXd basis = json_mat(j["basis"]);
  require(basis.rows() == n && basis.cols() == n, ErrorCode::parse_error,
          "basis shape does not match dim");
  return Lattice::normalize(basis);
}

json lattice_to_json(const Lattice& x) {
  json j;
  j["dim"] = x.dim();
  j["basis"] = mat(x.basis());
  return j;
}

json report_to_json(const ShortVectorReport& rep) {
  json j;
  j["alpha"] = num(rep.alpha);
  json vs = json::array();
  for (const auto& v : rep.vectors) vs.push_back(vec(v));
  j["vectors"] = std::move(vs);
  json bp = json::array();
  for (double b : rep.breakpoints) bp.push_back(num(b));
  j["breakpoints"] = std::move(bp);
  return j;
}

json cover_membership_to_json(const CoverMembership& cm) {
  json j;
  if (cm.j)
    j["j"] = *cm.j;
  else
    j["j"] = nullptr;
  j["all"] = cm.all;
  json bp = json::array();
  for (double b : cm.breakpoints) bp.push_back(num(b));
  j["breakpoints"] = std::move(bp);
  return j;
}

WedgeClass wedge_from_json(const json& j) {
  require(j.contains("n") && j.contains("d") && j.contains("coeffs"), ErrorCode::parse_error,
          "wedge file needs {n, d, coeffs}");
  const int n = j["n"].get<int>();
  const int d = j["d"].get<int>();
  std::map<MultiIndex, double> coeffs;
  for (const auto& entry : j["coeffs"]) {
    std::vector<int> idx = entry.at("J").get<std::vector<int>>();
    coeffs.emplace(MultiIndex(std::move(idx)), json_num(entry.at("c")));
  }
  return WedgeClass(n, d, std::move(coeffs));
}

json wedge_to_json(const WedgeClass& w) {
  json j;
  j["n"] = w.n();
  j["d"] = w.d();
  json cs = json::array();
  for (const auto& [mi, c] : w.coeffs()) {
    json e;
    e["J"] = mi.indices();
    e["c"] = num(c);
    cs.push_back(std::move(e));
  }
  j["coeffs"] = std::move(cs);
  return j;
}

json stabilizer_to_json(const StabilizerSubspace& s) {
  json j;
  j["dimension"] = s.dimension;
  j["basis"] = mat(s.basis);
  return j;
}

Flag flag_from_json(const json& j) {
  require(j.contains("n") && j.contains("rows"), ErrorCode::parse_error,
          "flag file needs {n, rows}");
  const int n = j["n"].get<int>();
  const Eigen::MatrixXd rows = json_mat(j["rows"]);
  require(rows.rows() == n && rows.cols() == n, ErrorCode::parse_error,
          "flag rows must form an n x n matrix");
  return Flag::from_chain(rows);
}

json flag_analysis_to_json(const std::vector<MultiIndex>& nested, const FlagCodimReport& codim) {
  json j;
  json ns = json::array();
  for (const auto& mi : nested) ns.push_back(mi.indices());
  j["nested"] = std::move(ns);
  j["codim"] = codim.codim;
  j["satisfies"] = codim.satisfies;
  j["stabilizer_dim"] = codim.stabilizer_dim;
  return j;
}

std::pair<Lattice, ClosedOrbitStructure> orbit_from_spec_json(const json& j) {
  require(j.contains("blocks") && j["blocks"].is_array() && !j["blocks"].empty(),
          ErrorCode::parse_error, "orbit spec needs a nonempty blocks array");
  std::vector<OrbitPart> parts;
  for (const auto& b : j["blocks"]) {
    const std::string type = b.at("type").get<std::string>();
    if (type == "unit") {
      parts.push_back(OrbitPart::unit());
    } else if (type == "quadratic") {
      parts.push_back(OrbitPart::quadratic(b.at("D").get<std::int64_t>()));
    } else {
      fail(ErrorCode::parse_error, "unknown block type: " + type);
    }
  }
  return block_sum(parts);
}

json orbit_to_json(const Lattice& x, const ClosedOrbitStructure& s) {
  json j;
  j["lattice"] = lattice_to_json(x);
  j["blocks"] = s.blocks;
  j["t1_dim"] = s.t1_dim();
  j["t2_dim"] = s.t2_dim();
  json gens = json::array();
  for (const auto& g : s.t2_stabilizer_gens) gens.push_back(vec(g));
  j["t2_stabilizer_gens"] = std::move(gens);
  return j;
}

json search_result_to_json(const SearchResult& r) {
  json j;
  j["a_star"] = vec(r.a_star.log_coords());
  j["lattice"] = lattice_to_json(r.lattice);
  j["spread"] = num(r.spread_value);
  j["evaluations"] = r.evaluations;
  j["converged"] = r.converged;
  return j;
}

std::string trace_csv(const SearchResult& r) {
  std::ostringstream out;
  const int n = r.a_star.dim();
  for (int i = 0; i < n - 1; ++i) out << "t_" << (i + 1) << ",";
  out << "spread\n";
  char buf[40];
  for (const auto& [t, sp] : r.trace) {
    for (int i = 0; i < n - 1; ++i) {
      std::snprintf(buf, sizeof(buf), "%.12g", t(i));
      out << buf << ",";
    }
    std::snprintf(buf, sizeof(buf), "%.12g", sp);
    out << buf << "\n";
  }
  return out.str();
}

bool domain_is_kkm(const json& j) {
  return j.contains("domain") && j["domain"].contains("type") &&
         j["domain"]["type"].get<std::string>() == "kkm";
}

GridDomain domain_from_json(const json& j) {
  require(j.is_object(), ErrorCode::parse_error, "domain must be an object");
  const std::string type = j.value("type", std::string("simplex_box"));
  const int resolution = j.value("resolution", 32);
  if (type == "kkm") {
    return GridDomain::kkm(j.at("s1").get<int>(), j.at("s2").get<int>(), resolution);
  }
  require(type == "simplex_box", ErrorCode::parse_error, "unknown domain type: " + type);
  const int s = j.value("s", 0);
  const int t = j.value("t", 0);
  const double rho = j.value("rho", 1.0);
  const double t_bounds = j.value("t_bounds", 1.0);
  return GridDomain::simplex_box(s, t, rho, t_bounds, resolution);
}

Cover cover_from_json(const json& j) {
  require(j.contains("elements") && j["elements"].is_array() && !j["elements"].empty(),
          ErrorCode::parse_error, "cover file needs a nonempty elements array");
  Cover cover;
  for (const auto& e : j["elements"]) {
    CoverElement el;
    el.label = e.value("label", std::string());
    require(e.contains("boxes") && e["boxes"].is_array(), ErrorCode::parse_error,
            "element needs a boxes array");
    for (const auto& b : e["boxes"]) {
      require(b.is_array() && b.size() == 2, ErrorCode::parse_error,
              "box must be a [lo, hi] pair");
      Box box{json_vec(b[0]), json_vec(b[1])};
      require(box.lo.size() == box.hi.size(), ErrorCode::parse_error, "box bounds mismatch");
      el.boxes.push_back(std::move(box));
    }
    cover.elements.push_back(std::move(el));
  }
  return cover;
}

std::vector<std::array<int, 2>> face_misses_from_json(const json& j) {
  std::vector<std::array<int, 2>> out;
  for (const auto& e : j["elements"]) {
    std::array<int, 2> m{-1, -1};
    if (e.contains("misses")) {
      const auto& ms = e["misses"];
      require(ms.is_array() && ms.size() <= 2, ErrorCode::parse_error,
              "misses must list at most two faces");
      for (std::size_t i = 0; i < ms.size(); ++i)
        m[i] = ms[i].is_null() ? -1 : ms[i].get<int>();
    }
    out.push_back(m);
  }
  return out;
}

json certify_report_to_json(const CertifyReport& rep) {
  json j;
  j["order"] = rep.order;
  j["witness"] = vec(rep.witness);
  j["s"] = rep.s;
  j["t"] = rep.t;
  j["required"] = rep.s + rep.t + 1;
  j["hypotheses_checked"] = rep.hypotheses_checked;
  j["hyp_i_ok"] = rep.hyp_i_ok;
  j["hyp_i_failures"] = rep.hyp_i_failures;
  json fits = json::array();
  for (const auto& f : rep.hyp_ii) {
    json e;
    e["elements"] = f.elements;
    e["k"] = f.k;
    e["component_size"] = f.component_size;
    e["fitted_dim"] = f.fitted_dim;
    e["max_residual"] = num(f.max_residual);
    fits.push_back(std::move(e));
  }
  j["hyp_ii"] = std::move(fits);
  j["violated"] = rep.violated;
  j["grid_certified"] = true;
  return j;
}

json kkm_report_to_json(const KkmReport& rep) {
  json j;
  j["order"] = rep.order;
  j["witness"] = vec(rep.witness);
  j["required"] = rep.required;
  j["satisfied"] = rep.satisfied;
  j["grid_certified"] = true;
  return j;
}

json order_report_to_json(const OrderReport& rep) {
  json j;
  j["order"] = rep.order;
  j["witness"] = vec(rep.witness);
  return j;
}

std::string heatmap_csv(const GridCover& gc) {
  std::ostringstream out;
  for (int i = 0; i < gc.domain.dim(); ++i) out << "x" << (i + 1) << ",";
  out << "multiplicity\n";
  char buf[40];
  for (std::size_t o = 0; o < gc.domain.num_points(); ++o) {
    const Eigen::VectorXd p = gc.domain.point(o);
    for (int i = 0; i < p.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.12g", p(i));
      out << buf << ",";
    }
    out << gc.multiplicity(o) << "\n";
  }
  return out.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::io_error, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::io_error, "cannot write " + path);
  out << content;
}

}  // namespace wellround::io
