#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "graphonlab/density.hpp"
#include "graphonlab/dsl_parser.hpp"
#include "graphonlab/forcing.hpp"
#include "graphonlab/spectral.hpp"
#include "graphonlab/step.hpp"
#include "graphonlab/universal.hpp"
#include "graphonlab/verify.hpp"

namespace graphonlab {

inline constexpr const char* kVersion = "0.1.0";

using Json = nlohmann::ordered_json;

// Reproducibility knobs; recorded verbatim in every output artifact.
struct RunConfig {
  uint64_t seed = 1;
  long long samples = 10'000;
  int tuples = 24;
  double tol = 1e-3;
  int depth = 3;
  int workers = 0;
  int resolution = 256;

  Json to_json() const {
    Json j;
    j["seed"] = seed;
    j["samples"] = samples;
    j["tuples"] = tuples;
    j["tol"] = tol;
    j["depth"] = depth;
    j["workers"] = workers <= 0 ? default_workers() : workers;
    j["resolution"] = resolution;
    return j;
  }
};

inline Json with_provenance(Json j, const RunConfig& cfg) {
  j["version"] = kVersion;
  j["config"] = cfg.to_json();
  return j;
}

// ---- step graphon JSON (bit-exact rational round trip) ----

inline Json step_to_json(const StepGraphon& w) {
  Json j;
  std::vector<std::string> measures;
  for (const auto& m : w.measures()) measures.push_back(m.str());
  j["measures"] = measures;
  std::vector<std::vector<std::string>> values;
  for (size_t i = 0; i < w.parts(); ++i) {
    std::vector<std::string> row;
    for (size_t k = 0; k < w.parts(); ++k) row.push_back(w.block(i, k).str());
    values.push_back(std::move(row));
  }
  j["values"] = values;
  return j;
}

inline StepPtr step_from_json(const Json& j) {
  std::vector<Rational> measures;
  for (const auto& m : j.at("measures")) measures.push_back(Rational::from_string(m));
  std::vector<std::vector<Rational>> values;
  for (const auto& row : j.at("values")) {
    std::vector<Rational> out;
    for (const auto& v : row) out.push_back(Rational::from_string(v));
    values.push_back(std::move(out));
  }
  return step_graphon(std::move(measures), std::move(values));
}

// ---- CSV rows for density reports ----

inline std::string density_csv_header() { return "graph,estimate,std_error,samples,method"; }

inline std::string density_csv_row(const std::string& graph, const DensityReport& rep) {
  std::ostringstream os;
  os << graph << "," << std::setprecision(17) << rep.estimate << "," << rep.std_error << ","
     << rep.samples << "," << rep.method;
  return os.str();
}

// ---- rigidity verdict JSON ----

inline Json verdict_to_json(const RigidityVerdict& v) {
  Json j;
  j["verdict"] = v.verdict;
  j["t_c4_w1"] = v.t_c4_w1;
  j["t_c4_w2"] = v.t_c4_w2;
  j["max_discrepancy"] = v.max_discrepancy;
  j["sampled_points"] = v.sampled_points;
  j["pullback_violations"] = v.pullback_violations;
  return j;
}

// ---- build manifest for the universal construction ----

inline Json manifest_to_json(const UniversalGraphon& u) {
  Json j;
  j["r"] = u.r;
  j["epsilon"] = u.epsilon.str();
  j["M"] = u.big_m;
  j["m"] = u.small_m;
  j["rho"] = u.rho.str();
  j["ckm"] = "mock";
  j["profile_depth"] = u.depth;
  j["wf"] = step_to_json(*u.wf);
  std::vector<std::string> q;
  for (const auto& qm : u.q_measures) q.push_back(qm.str());
  j["q_measures"] = q;
  Json parts = Json::array();
  for (size_t i = 0; i < u.table().size(); ++i) {
    const auto& p = u.table().part(int(i));
    Json pj;
    pj["name"] = p.name;
    pj["group"] = std::string(1, p.group);
    pj["lo"] = p.lo.str();
    pj["hi"] = p.hi.str();
    pj["measure"] = p.measure().str();
    if (p.has_pre_degree) pj["pre_degree"] = p.pre_degree.str();
    pj["delta"] = p.delta;
    parts.push_back(std::move(pj));
  }
  j["parts"] = std::move(parts);
  return j;
}

// Rebuilds the construction deterministically from its manifest.
inline UniversalGraphon universal_from_manifest(const Json& j) {
  ReorderedInput input;
  input.wf = step_from_json(j.at("wf"));
  for (const auto& q : j.at("q_measures"))
    input.q_measures.push_back(Rational::from_string(q));
  auto table = build_part_table(j.at("r"), input.q_measures);
  return build_w0(input, table, mock_ckm(input.wf), j.at("profile_depth"));
}

// ---- verification report JSON ----

inline Json report_to_json(const W0Report& rep) {
  Json j;
  Json items = Json::array();
  for (const auto& item : rep.items) {
    Json ij;
    ij["name"] = item.name;
    ij["passed"] = item.passed;
    ij["observed"] = item.observed;
    ij["tolerance"] = item.tolerance;
    ij["note"] = item.note;
    items.push_back(std::move(ij));
  }
  j["items"] = std::move(items);
  Json suites = Json::array();
  for (const auto& s : rep.suites) {
    Json sj;
    sj["suite"] = s.suite;
    sj["passed"] = s.passed;
    sj["failed"] = s.failed;
    sj["vacuous"] = s.vacuous;
    Json rows = Json::array();
    for (const auto& c : s.constraints) {
      Json cj;
      cj["name"] = c.name;
      cj["passed"] = c.passed;
      cj["vacuous"] = c.vacuous;
      cj["max_abs_deviation"] = c.max_abs_deviation;
      cj["pooled_se"] = c.pooled_se;
      cj["tuples"] = c.tuples;
      cj["samples"] = c.samples;
      if (!c.note.empty()) cj["note"] = c.note;
      rows.push_back(std::move(cj));
    }
    sj["constraints"] = std::move(rows);
    suites.push_back(std::move(sj));
  }
  j["suites"] = std::move(suites);
  j["all_passed"] = rep.all_passed();
  return j;
}

// ---- forcing certificate JSON ----

inline Json certificate_to_json(const ForcingCertificate& cert) {
  Json j;
  j["n"] = cert.n;
  j["m"] = cert.m;
  j["z"] = cert.z;
  j["z_requested"] = cert.z_requested;
  j["eps_prime"] = cert.eps_prime.str();
  j["newton_iterations"] = cert.newton_iterations;
  j["newton_residual"] = cert.newton_residual;
  Json dw = Json::object();
  Json dwp = Json::object();
  for (size_t i = 0; i < cert.class_names.size(); ++i) {
    dw[cert.class_names[i]] = cert.densities_w[i];
    dwp[cert.class_names[i]] = cert.densities_wprime[i];
  }
  j["densities_W"] = std::move(dw);
  j["densities_Wprime"] = std::move(dwp);
  j["max_density_gap"] = cert.max_density_gap;
  j["omega_W"] = cert.gap.omega_w.str();
  j["omega_Wprime"] = cert.gap.omega_wprime.str();
  j["omega_gap"] = cert.gap.gap.str();
  j["gap_lower_bound"] = cert.gap.gap_lower_bound;
  j["verdict"] = cert.gap.verdict;
  j["W"] = step_to_json(*cert.w.w);
  j["Wprime"] = step_to_json(*cert.wprime.w);
  return j;
}

// ---- PGM rendering ----

// 8-bit grayscale, 0 -> white and 1 -> black, origin in the top left corner.
inline std::string render_pgm(const Kernel& w, int resolution, const RunConfig& cfg) {
  if (resolution < 16) throw std::invalid_argument("resolution must be >= 16");
  std::ostringstream os;
  os << "P5\n# graphonlab " << kVersion << " seed=" << cfg.seed
     << " resolution=" << resolution << "\n"
     << resolution << " " << resolution << "\n255\n";
  for (int row = 0; row < resolution; ++row) {
    double y = (row + 0.5) / resolution;
    for (int col = 0; col < resolution; ++col) {
      double x = (col + 0.5) / resolution;
      double v = w.value(x, y);
      int gray = int(std::lround(255.0 * (1.0 - v)));
      os.put(char(std::clamp(gray, 0, 255)));
    }
  }
  return os.str();
}

// ---- file helpers ----

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Kernel reference for the CLI: a JSON file path or one of the builtin
// tokens const:<rational>, half, checker:<r>.
inline KernelPtr load_kernel(const std::string& ref) {
  if (ref.rfind("const:", 0) == 0)  // as a one-part step graphon: exact paths apply
    return step_graphon({Rational(1)}, {{Rational::from_string(ref.substr(6))}});
  if (ref == "half") return half_graphon();
  if (ref.rfind("checker:", 0) == 0) return checker_graphon(std::stoi(ref.substr(8)));
  return step_from_json(Json::parse(read_file(ref)));
}

// Step graphon admission for build inputs: JSON files and const:<q> load
// directly; other builtin kernels go through the N x N grid average.
inline StepPtr load_step(const std::string& ref, int grid_n = 256) {
  if (ref.rfind("const:", 0) == 0) {
    Rational c = Rational::from_string(ref.substr(6));
    return step_graphon({Rational(1)}, {{c}});
  }
  if (ref == "half" || ref.rfind("checker:", 0) == 0)
    return grid_graphon(*load_kernel(ref), grid_n);
  return step_from_json(Json::parse(read_file(ref)));
}

}  // namespace graphonlab
