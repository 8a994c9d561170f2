// C binding for the core library: opaque handles over the C++ values, with
// exceptions translated into status codes and JSON string results.

#include "wellround.h"

#include <cstring>
#include <string>

#include "core/covering.hpp"
#include "core/enumeration.hpp"
#include "core/exterior.hpp"
#include "core/lattice.hpp"
#include "core/lattice_ops.hpp"
#include "core/orbit.hpp"
#include "core/serialization.hpp"

using namespace wellround;

struct wr_lattice {
  Lattice value;
};

struct wr_orbit {
  Lattice lattice;
  ClosedOrbitStructure structure;
};

struct wr_cover {
  Cover cover;
  io::json file;  // retains the domain block and per-element declarations
};

namespace {

thread_local std::string g_last_error;

wr_status code_of(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_argument: return WR_ERR_INVALID_ARGUMENT;
    case ErrorCode::singular_basis: return WR_ERR_SINGULAR_BASIS;
    case ErrorCode::dimension_mismatch: return WR_ERR_DIMENSION_MISMATCH;
    case ErrorCode::enumeration_budget_exceeded: return WR_ERR_ENUM_BUDGET;
    case ErrorCode::not_well_rounded: return WR_ERR_NOT_WELL_ROUNDED;
    case ErrorCode::not_generic_well_rounded: return WR_ERR_NOT_GENERIC_WELL_ROUNDED;
    case ErrorCode::rank_deficient: return WR_ERR_RANK_DEFICIENT;
    case ErrorCode::index_out_of_range: return WR_ERR_INDEX_OUT_OF_RANGE;
    case ErrorCode::numerically_singular_minor: return WR_ERR_SINGULAR_MINOR;
    case ErrorCode::not_squarefree: return WR_ERR_NOT_SQUAREFREE;
    case ErrorCode::not_a_cover: return WR_ERR_NOT_A_COVER;
    case ErrorCode::unbounded_element: return WR_ERR_UNBOUNDED_ELEMENT;
    case ErrorCode::hypothesis_violated: return WR_ERR_HYPOTHESIS_VIOLATED;
    case ErrorCode::declaration_false: return WR_ERR_DECLARATION_FALSE;
    case ErrorCode::window_too_small: return WR_ERR_WINDOW_TOO_SMALL;
    case ErrorCode::parse_error: return WR_ERR_PARSE;
    case ErrorCode::io_error: return WR_ERR_IO;
  }
  return WR_ERR_UNKNOWN;
}

template <typename Fn>
wr_status guarded(Fn&& fn) {
  try {
    fn();
    return WR_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return code_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return WR_ERR_UNKNOWN;
  } catch (...) {
    g_last_error = "unknown error";
    return WR_ERR_UNKNOWN;
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

Eigen::VectorXd read_log_coords(const wr_lattice* x, const double* log_coords) {
  require(log_coords != nullptr, ErrorCode::invalid_argument, "log_coords is null");
  Eigen::VectorXd t(x->value.dim());
  for (int i = 0; i < t.size(); ++i) t(i) = log_coords[i];
  return t;
}

EnumOptions enum_options(uint64_t budget) {
  EnumOptions opts;
  if (budget > 0) opts.node_budget = budget;
  return opts;
}

}  // namespace

extern "C" {

const char* wr_version(void) { return "0.1.0"; }

const char* wr_last_error(void) { return g_last_error.c_str(); }

void wr_string_free(char* s) { delete[] s; }

wr_status wr_lattice_from_json(const char* json, wr_lattice** out) {
  return guarded([&] {
    require(json && out, ErrorCode::invalid_argument, "null argument");
    *out = new wr_lattice{io::lattice_from_json(io::parse(json))};
  });
}

wr_status wr_lattice_from_basis(int n, const double* row_major, wr_lattice** out) {
  return guarded([&] {
    require(row_major && out, ErrorCode::invalid_argument, "null argument");
    Eigen::MatrixXd basis(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) basis(i, j) = row_major[i * n + j];
    *out = new wr_lattice{Lattice::normalize(basis)};
  });
}

void wr_lattice_free(wr_lattice* x) { delete x; }

int wr_lattice_dim(const wr_lattice* x) { return x ? x->value.dim() : 0; }

wr_status wr_lattice_to_json(const wr_lattice* x, char** json_out) {
  return guarded([&] {
    require(x && json_out, ErrorCode::invalid_argument, "null argument");
    *json_out = dup_string(io::lattice_to_json(x->value).dump());
  });
}

wr_status wr_lattice_apply(const wr_lattice* x, const double* log_coords, wr_lattice** out) {
  return guarded([&] {
    require(x && out, ErrorCode::invalid_argument, "null argument");
    *out = new wr_lattice{apply(DiagonalElement(read_log_coords(x, log_coords)), x->value)};
  });
}

wr_status wr_short_vectors(const wr_lattice* x, double delta_max, uint64_t budget,
                           char** json_out) {
  return guarded([&] {
    require(x && json_out, ErrorCode::invalid_argument, "null argument");
    const auto rep = short_vectors(x->value, delta_max, enum_options(budget));
    *json_out = dup_string(io::report_to_json(rep).dump());
  });
}

wr_status wr_dim_delta(const wr_lattice* x, double delta, int* out) {
  return guarded([&] {
    require(x && out, ErrorCode::invalid_argument, "null argument");
    *out = dim_delta(x->value, delta);
  });
}

wr_status wr_cover_membership(const wr_lattice* x, const double* log_coords, double eps,
                              char** json_out) {
  return guarded([&] {
    require(x && json_out, ErrorCode::invalid_argument, "null argument");
    const DiagonalElement a(read_log_coords(x, log_coords));
    *json_out = dup_string(io::cover_membership_to_json(cover_membership(x->value, a, eps)).dump());
  });
}

wr_status wr_is_well_rounded(const wr_lattice* x, double tol, int* out) {
  return guarded([&] {
    require(x && out, ErrorCode::invalid_argument, "null argument");
    *out = is_well_rounded(x->value, tol) ? 1 : 0;
  });
}

wr_status wr_is_generic_well_rounded(const wr_lattice* x, double tol, int* out) {
  return guarded([&] {
    require(x && out, ErrorCode::invalid_argument, "null argument");
    *out = is_generic_well_rounded(x->value, tol) ? 1 : 0;
  });
}

wr_status wr_transversality_rank(const wr_lattice* x, int* out) {
  return guarded([&] {
    require(x && out, ErrorCode::invalid_argument, "null argument");
    *out = wellround::wr_transversality_rank(x->value);
  });
}

wr_status wr_spread(const wr_lattice* x, double* out) {
  return guarded([&] {
    require(x && out, ErrorCode::invalid_argument, "null argument");
    *out = spread(x->value);
  });
}

wr_status wr_wedge_of_group(int d, int n, const double* rows, char** json_out) {
  return guarded([&] {
    require(rows && json_out, ErrorCode::invalid_argument, "null argument");
    Eigen::MatrixXd m(d, n);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = rows[i * n + j];
    *json_out = dup_string(io::wedge_to_json(WedgeClass::wedge_of_group(m)).dump());
  });
}

wr_status wr_covolume(int d, int n, const double* rows, double* out) {
  return guarded([&] {
    require(rows && out, ErrorCode::invalid_argument, "null argument");
    Eigen::MatrixXd m(d, n);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = rows[i * n + j];
    *out = covolume(m);
  });
}

wr_status wr_stabilizer_subspace(const char* json, char** json_out) {
  return guarded([&] {
    require(json && json_out, ErrorCode::invalid_argument, "null argument");
    const auto j = io::parse(json);
    const int n = j.at("n").get<int>();
    std::vector<MultiIndex> supports;
    for (const auto& s : j.at("supports"))
      supports.emplace_back(s.get<std::vector<int>>());
    *json_out = dup_string(io::stabilizer_to_json(stabilizer_subspace(n, supports)).dump());
  });
}

wr_status wr_flag_analyze(const char* json, char** json_out) {
  return guarded([&] {
    require(json && json_out, ErrorCode::invalid_argument, "null argument");
    const Flag flag = io::flag_from_json(io::parse(json));
    const auto nested = nested_multiindices(flag);
    const auto codim = flag_codim_check(flag);
    *json_out = dup_string(io::flag_analysis_to_json(nested, codim).dump());
  });
}

wr_status wr_orbit_from_spec_json(const char* json, wr_orbit** out) {
  return guarded([&] {
    require(json && out, ErrorCode::invalid_argument, "null argument");
    auto [x, s] = io::orbit_from_spec_json(io::parse(json));
    *out = new wr_orbit{std::move(x), std::move(s)};
  });
}

wr_status wr_orbit_compact_from_quadratic(int64_t d, wr_orbit** out) {
  return guarded([&] {
    require(out != nullptr, ErrorCode::invalid_argument, "null argument");
    auto [x, s] = compact_orbit_from_quadratic(d);
    *out = new wr_orbit{std::move(x), std::move(s)};
  });
}

void wr_orbit_free(wr_orbit* o) { delete o; }

wr_status wr_orbit_to_json(const wr_orbit* o, char** json_out) {
  return guarded([&] {
    require(o && json_out, ErrorCode::invalid_argument, "null argument");
    *json_out = dup_string(io::orbit_to_json(o->lattice, o->structure).dump());
  });
}

wr_status wr_orbit_lattice(const wr_orbit* o, wr_lattice** out) {
  return guarded([&] {
    require(o && out, ErrorCode::invalid_argument, "null argument");
    *out = new wr_lattice{o->lattice};
  });
}

wr_status wr_orbit_search(const wr_orbit* o, uint64_t budget, uint64_t seed, double target_tol,
                          char** result_json, char** trace_csv_out) {
  return guarded([&] {
    require(o && result_json, ErrorCode::invalid_argument, "null argument");
    SearchOptions opts;
    opts.budget = budget;
    opts.seed = seed;
    opts.target_tol = target_tol;
    opts.record_trace = trace_csv_out != nullptr;
    const SearchResult res = search_well_rounded(o->lattice, o->structure, opts);
    *result_json = dup_string(io::search_result_to_json(res).dump());
    if (trace_csv_out) *trace_csv_out = dup_string(io::trace_csv(res));
  });
}

wr_status wr_cover_from_json(const char* json, wr_cover** out) {
  return guarded([&] {
    require(json && out, ErrorCode::invalid_argument, "null argument");
    const auto j = io::parse(json);
    require(j.contains("domain"), ErrorCode::parse_error, "cover file needs a domain");
    io::domain_from_json(j["domain"]);  // validate early
    *out = new wr_cover{io::cover_from_json(j), j};
  });
}

void wr_cover_free(wr_cover* c) { delete c; }

wr_status wr_cover_certify(const wr_cover* c, int check_hypotheses, char** report_json,
                           char** heatmap_csv_out) {
  return guarded([&] {
    require(c && report_json, ErrorCode::invalid_argument, "null argument");
    const GridDomain domain = io::domain_from_json(c->file["domain"]);
    const GridCover gc = materialize(c->cover, domain);
    io::json rep;
    if (io::domain_is_kkm(c->file)) {
      rep = io::kkm_report_to_json(kkm_check(gc, io::face_misses_from_json(c->file)));
    } else {
      rep = io::certify_report_to_json(certify_multiplicity(gc, check_hypotheses != 0));
    }
    *report_json = dup_string(rep.dump());
    if (heatmap_csv_out) *heatmap_csv_out = dup_string(io::heatmap_csv(gc));
  });
}

wr_status wr_cover_unfold(const wr_cover* c, const double* window, int resolution,
                          char** report_json) {
  return guarded([&] {
    require(c && window && report_json, ErrorCode::invalid_argument, "null argument");
    const GridDomain source = io::domain_from_json(c->file["domain"]);
    const int dim = source.dim();
    Eigen::VectorXd lo(dim), hi(dim);
    for (int i = 0; i < dim; ++i) {
      lo(i) = window[i];
      hi(i) = window[dim + i];
    }
    const GridDomain win = GridDomain::window(lo, hi, resolution);
    const GridCover pulled = unfold_cover(c->cover, source, win);
    const auto order = cover_order(pulled);
    const auto source_order = cover_order(materialize(c->cover, source));
    io::json rep;
    rep["order"] = order.order;
    rep["witness"] = io::vec(order.witness);
    rep["source_order"] = source_order.order;
    *report_json = dup_string(rep.dump());
  });
}

wr_status wr_fold_point(int s, const double* in, double* out) {
  return guarded([&] {
    require(in && out && s >= 1, ErrorCode::invalid_argument, "bad fold arguments");
    Eigen::VectorXd x(s);
    for (int i = 0; i < s; ++i) x(i) = in[i];
    const Eigen::VectorXd y = fold_to_cfk(x);
    for (int i = 0; i < s; ++i) out[i] = y(i);
  });
}

}  // extern "C"
