// cmnls: dataset generation, spectral sweeps and verification suites.
//
// Exit codes: 0 success, 1 a verification suite failed, 2 usage or config
// error, 3 dataset schema error, 4 precondition violated, 5 numerical
// failure, 6 I/O error.

#include <omp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "cmnls/config.hpp"
#include "cmnls/errors.hpp"
#include "cmnls/field_io.hpp"
#include "cmnls/pipeline.hpp"
#include "cmnls/residues.hpp"
#include "cmnls/rh.hpp"
#include "cmnls/verify.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace cmnls;

namespace {

enum Exit { kOk = 0, kSuiteFail = 1, kUsage = 2, kSchema = 3, kPrecondition = 4, kNumerical = 5, kIo = 6 };

class IoError : public Error {
 public:
  using Error::Error;
};

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

json mjson(const Matrix3C& m) {
  json rows = json::array();
  for (int i = 0; i < 3; ++i) {
    json r = json::array();
    for (int j = 0; j < 3; ++j) r.push_back(cjson(m(i, j)));
    rows.push_back(r);
  }
  return rows;
}

// JSON cannot carry inf/nan; they are written as strings.
json num(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

const char* relation_name(Relation r) {
  switch (r) {
    case Relation::AtMost: return "<=";
    case Relation::AtLeast: return ">=";
    case Relation::Equal: return "==";
  }
  return "?";
}

struct Options {
  std::string config, dataset, out_dir;
  std::vector<std::string> suites;
  int threads = 0;
  bool override_guard = false;
};

struct Session {
  RunConfig cfg;
  fs::path out;
  std::string command;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
};

Session open_session(const Options& o, const std::string& command) {
  Session s;
  s.command = command;
  s.cfg = o.config.empty() ? RunConfig{} : load_config(o.config, command != "generate");
  if (!o.dataset.empty()) s.cfg.dataset = o.dataset;
  if (!o.out_dir.empty()) s.cfg.out_dir = o.out_dir;
  if (!o.suites.empty()) s.cfg.suites = o.suites;
  if (o.threads > 0) s.cfg.threads = o.threads;
  if (o.override_guard) s.cfg.override_domain_guard = true;
  validate_config(s.cfg);
  if (s.cfg.threads > 0) omp_set_num_threads(s.cfg.threads);
  s.out = s.cfg.out_dir;
  std::error_code ec;
  fs::create_directories(s.out, ec);
  if (ec) throw IoError("cannot create " + s.out.string() + ": " + ec.message());
  return s;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  os << text;
  if (!os) throw IoError("cannot write " + p.string());
}

// The report holds only deterministic content; wall-clock data goes to the
// .meta.json sidecar.
void write_report(const Session& s, const std::string& name, const json& body) {
  json report;
  report["command"] = s.command;
  report["config"] = json::parse(config_to_text(s.cfg));
  report["result"] = body;
  write_text(s.out / (name + ".json"), report.dump(2) + "\n");

  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::ostringstream ts;
  ts << std::put_time(std::gmtime(&tt), "%Y-%m-%dT%H:%M:%SZ");
  json meta;
  meta["timestamp"] = ts.str();
  meta["wall_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - s.start).count();
  meta["omp_max_threads"] = omp_get_max_threads();
  write_text(s.out / (name + ".meta.json"), meta.dump(2) + "\n");
  std::cout << "wrote " << (s.out / (name + ".json")).string() << "\n";
}

FieldData dataset_for(const Session& s) {
  if (s.cfg.dataset.empty()) {
    std::cerr << "no dataset given; generating one from the config\n";
    return generate_dataset(s.cfg);
  }
  if (!fs::exists(s.cfg.dataset)) throw IoError("dataset not found: " + s.cfg.dataset);
  return load_field_data(s.cfg.dataset);
}

json locus_json(const ZeroLocus& z) {
  return {{"lambda", cjson(z.lambda)},
          {"scalar", scalar_name(z.which)},
          {"region", region_name(z.region)},
          {"multiplicity", z.multiplicity},
          {"newton_residual", num(z.newton_residual)},
          {"assumption_violation", z.assumption_violation}};
}

// ---- subcommands ------------------------------------------------------------

int cmd_generate(const Options& o) {
  Session s = open_session(o, "generate");
  const FieldData fd = generate_dataset(s.cfg);
  const fs::path path = s.cfg.dataset.empty() ? s.out / "dataset.json" : fs::path(s.cfg.dataset);
  save_field_data(fd, path.string());
  json body;
  body["dataset"] = path.string();
  for (const auto& [k, v] : fd.metadata) body["metadata"][k] = v;
  write_report(s, "generate", body);
  return kOk;
}

int cmd_verify(const Options& o) {
  Session s = open_session(o, "verify");
  std::vector<const Suite*> chosen;
  if (s.cfg.suites.empty())
    for (const auto& su : suites()) chosen.push_back(&su);
  else
    for (const auto& n : s.cfg.suites) chosen.push_back(&find_suite(n));
  const FieldData fd = dataset_for(s);

  json out = json::array();
  bool all = true;
  for (const Suite* su : chosen) {
    std::cout << "[" << su->name << "]" << std::flush;
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<Metric> ms = su->run(VerifyContext{fd, s.cfg, Exec::Parallel});
    const bool ok = suite_passed(ms);
    all = all && ok;
    std::cout << " " << (ok ? "pass" : "FAIL") << " ("
              << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
              << " s)\n";
    json mj = json::array();
    for (const Metric& m : ms) {
      mj.push_back({{"suite", m.suite},
                    {"metric", m.name},
                    {"value", num(m.value)},
                    {"relation", relation_name(m.relation)},
                    {"tolerance", num(m.tolerance)},
                    {"pass", m.pass},
                    {"gating", m.gating},
                    {"criterion", m.criterion},
                    {"note", m.note}});
      std::cout << "  " << (m.pass ? "ok  " : (m.gating ? "FAIL" : "info")) << " " << m.name
                << " = " << m.value << " (" << relation_name(m.relation) << " " << m.tolerance
                << ")\n";
    }
    out.push_back({{"suite", su->name}, {"criterion", su->criterion}, {"pass", ok}, {"metrics", mj}});
  }
  write_report(s, "verify", {{"pass", all}, {"suites", out}});
  return all ? kOk : kSuiteFail;
}

ModelParams params_for(const Session& s) {
  if (s.cfg.dataset.empty()) return s.cfg.params;
  return dataset_for(s).params();
}

int cmd_regions(const Options& o) {
  Session s = open_session(o, "regions");
  const ModelParams p = params_for(s);
  const auto& sp = s.cfg.spectral;
  const RegionRaster r = region_map_grid(sp.region_box, sp.raster, sp.raster, p);
  std::ostringstream csv;
  csv << "re,im,region\n" << std::setprecision(17);
  std::array<std::size_t, 5> counts{};
  for (std::size_t iy = 0; iy < r.ny; ++iy)
    for (std::size_t ix = 0; ix < r.nx; ++ix) {
      const cplx z = r.point(ix, iy);
      csv << z.real() << "," << z.imag() << "," << region_index(r.at(ix, iy)) << "\n";
      ++counts[region_index(r.at(ix, iy))];
    }
  write_text(s.out / "regions_raster.csv", csv.str());
  auto lines = [](const std::vector<Polyline>& ps) {
    json a = json::array();
    for (const auto& pl : ps) {
      json pts = json::array();
      for (cplx z : pl.points) pts.push_back(cjson(z));
      a.push_back({{"closed", pl.closed}, {"points", pts}});
    }
    return a;
  };
  json body;
  body["raster_csv"] = "regions_raster.csv";
  body["counts"] = {{"boundary", counts[0]}, {"D1", counts[1]}, {"D2", counts[2]},
                    {"D3", counts[3]}, {"D4", counts[4]}};
  body["im_k_zero"] = lines(r.im_k_zero);
  body["im_k2_zero"] = lines(r.im_k2_zero);
  json gamma = json::object();
  for (int n = 0; n < 4; ++n) gamma[region_name(region_from_index(n + 1))] = gamma_table()[n];
  body["gamma"] = gamma;
  write_report(s, "regions", body);
  return kOk;
}

int cmd_jumps(const Options& o) {
  Session s = open_session(o, "jumps");
  const FieldData fd = dataset_for(s);
  const ModelParams& p = fd.params();
  ScatteringOptions so = scattering_options(s.cfg);
  so.override_domain_guard = true;
  const double x = 1.0, t = 0.25 * fd.t_max();
  MOptions mo;
  mo.route = AssemblyRoute::Product;
  mo.scattering = so;
  mo.singular_tol = s.cfg.tol.singular;
  const auto pts = boundary_arc_sample(s.cfg.spectral.boundary_radius, s.cfg.spectral.boundary_samples, p);
  std::vector<json> rows(pts.size());
  std::vector<double> resid(pts.size());
#pragma omp parallel for schedule(dynamic)
  for (long n = 0; n < long(pts.size()); ++n) {
    const cplx l = pts[n];
    const RegionSet adj = adjacent_regions(l, p, 1e-9);
    std::vector<Region> rs;
    for (int r = 1; r <= 4; ++r)
      if (contains(adj, region_from_index(r))) rs.push_back(region_from_index(r));
    try {
      const Matrix3C sm = compute_s(fd, l, so), Sm = compute_S(fd, l, so);
      const JumpRecord J = jump_matrix(rs.at(0), rs.at(1), sm, Sm, x, t, l, p, s.cfg.tol.singular);
      const Matrix3C Mm = assemble_M_in(fd, x, t, l, rs[0], mo).M;
      const Matrix3C Mn = assemble_M_in(fd, x, t, l, rs[1], mo).M;
      resid[n] = norm_max(Mn - Mm * J.J) / (norm_max(Mm) * norm_max(J.J));
      rows[n] = {{"lambda", cjson(l)},           {"m", region_name(J.m)},
                 {"n", region_name(J.n)},        {"J", mjson(J.J)},
                 {"det_J_minus_1", num(std::abs(det(J.J) - 1.0))},
                 {"identity_residual", num(resid[n])}};
    } catch (const Error& e) {
      resid[n] = NAN;
      rows[n] = {{"lambda", cjson(l)}, {"error", e.what()}};
    }
  }
  std::ostringstream csv;
  csv << "re,im,identity_residual\n" << std::setprecision(17);
  for (std::size_t n = 0; n < pts.size(); ++n)
    csv << pts[n].real() << "," << pts[n].imag() << "," << resid[n] << "\n";
  write_text(s.out / "jumps_trace.csv", csv.str());
  write_report(s, "jumps", {{"x", x}, {"t", t}, {"samples", rows}, {"trace_csv", "jumps_trace.csv"}});
  return kOk;
}

int cmd_residues(const Options& o) {
  Session s = open_session(o, "residues");
  const FieldData fd = dataset_for(s);
  const ZeroCensus census = zero_census(fd, s.cfg);
  json regions = json::array();
  bool violation = false;
  for (int n = 0; n < 4; ++n) {
    const Region r = region_from_index(n + 1);
    json zs = json::array();
    for (const auto& z : census.zeros[n]) {
      zs.push_back(locus_json(z));
      violation = violation || z.assumption_violation;
    }
    regions.push_back({{"region", region_name(r)},
                       {"scalar", scalar_name(scalar_for_region(r))},
                       {"count", census.zeros[n].size()},
                       {"zeros", zs},
                       {"error", census.error[n]}});
  }
  // manufactured check: planted simple zero per region, formula vs contour
  const cplx planted[4] = {{1.0, 0.3}, {0.6, 1.4}, {0.6, -1.4}, {1.0, -0.3}};
  json manufactured = json::array();
  for (int n = 0; n < 4; ++n) {
    const Region r = region_from_index(n + 1);
    const ManufacturedData d = make_manufactured(r, planted[n], s.cfg.seed + 11 + n, fd.params());
    const ScalarKind kind = scalar_for_region(r);
    const ScalarFunction g = [&](cplx l) { return eval_scalar(kind, d.s(l), d.S(l)); };
    const Box box{planted[n].real() - 0.5, planted[n].real() + 0.5, planted[n].imag() - 0.5,
                  planted[n].imag() + 0.5};
    const auto zs = find_zeros(g, kind, r, box, fd.params());
    json recs = json::array();
    const double x = 0.7, t = 0.3;
    const MatrixFunction M = [&](cplx l) { return d.M(l, x, t); };
    for (const auto& z : zs)
      for (const auto& rec : residue_coefficients(d.s, d.S, z, x, t, fd.params())) {
        json terms = json::array();
        for (const auto& term : rec.terms)
          terms.push_back({{"source", term.source}, {"coefficient", cjson(term.coefficient)}});
        recs.push_back({{"locus", locus_json(z)},
                        {"column", rec.column},
                        {"terms", terms},
                        {"theta", cjson(rec.theta_value)},
                        {"contour_discrepancy",
                         num(verify_residue_contour(M, rec, s.cfg.spectral.residue_radius,
                                                    fd.params(), s.cfg.spectral.residue_nodes))}});
      }
    manufactured.push_back({{"region", region_name(r)},
                            {"planted", cjson(planted[n])},
                            {"count", zs.size()},
                            {"records", recs}});
  }
  json body;
  body["counts"] = {{"D1", census.zeros[0].size()}, {"D2", census.zeros[1].size()},
                    {"D3", census.zeros[2].size()}, {"D4", census.zeros[3].size()}};
  body["assumption_violation"] = violation;
  body["dataset"] = regions;
  body["manufactured"] = manufactured;
  write_report(s, "residues", body);
  return kOk;
}

int cmd_global(const Options& o) {
  Session s = open_session(o, "global");
  const FieldData fd = dataset_for(s);
  const auto& sp = s.cfg.spectral;
  const auto lams = disk_sample(sp.global_samples, sp.global_radius, sp.global_margin,
                                s.cfg.seed + 7, fd.params());
  const GlobalRelationReport rep = global_relation_residual(fd, lams, scattering_options(s.cfg));
  std::ostringstream csv;
  csv << "re,im,region,col1,col2,col3,rel1,rel2,rel3\n" << std::setprecision(17);
  json samples = json::array();
  for (const auto& g : rep.samples) {
    csv << g.lambda.real() << "," << g.lambda.imag() << "," << region_index(g.region);
    json res = json::array(), rel = json::array();
    for (int j = 0; j < 3; ++j) {
      csv << "," << (g.valid[j] ? g.residual[j] : NAN);
      res.push_back(g.valid[j] ? num(g.residual[j]) : json(nullptr));
      rel.push_back(g.valid[j] ? num(g.relative[j]) : json(nullptr));
    }
    for (int j = 0; j < 3; ++j) csv << "," << (g.valid[j] ? g.relative[j] : NAN);
    csv << "\n";
    samples.push_back({{"lambda", cjson(g.lambda)},
                       {"region", region_name(g.region)},
                       {"residual", res},
                       {"relative", rel},
                       {"quad_error", num(g.quad_error)}});
  }
  write_text(s.out / "global_trace.csv", csv.str());
  const bool ok = rep.max_relative <= s.cfg.tol.global_relation;
  write_report(s, "global", {{"max_residual", num(rep.max_residual)},
                             {"median_residual", num(rep.median_residual)},
                             {"max_relative", num(rep.max_relative)},
                             {"tolerance", s.cfg.tol.global_relation},
                             {"pass", ok},
                             {"samples", samples},
                             {"trace_csv", "global_trace.csv"}});
  std::cout << "max masked residual " << rep.max_residual << ", relative " << rep.max_relative
            << "\n";
  return kOk;
}

int cmd_reconstruct(const Options& o) {
  Session s = open_session(o, "reconstruct");
  const FieldData fd = dataset_for(s);
  const auto& sp = s.cfg.spectral;
  ReconstructionOptions ro;
  ro.radii = sp.radii;
  ro.ray_angle = sp.ray_angle;
  ro.m.scattering = scattering_options(s.cfg);
  ro.m.singular_tol = s.cfg.tol.singular;
  std::vector<std::pair<double, double>> probes;
  for (double x : sp.probe_x)
    for (double t : sp.probe_t)
      if (fd.contains(x, t)) probes.push_back({x, t});
  std::vector<Reconstruction> recs(probes.size());
#pragma omp parallel for schedule(dynamic)
  for (long n = 0; n < long(probes.size()); ++n)
    recs[n] = reconstruct_uv(fd, probes[n].first, probes[n].second, ro);
  std::ostringstream csv;
  csv << "x,t,u_ref_re,u_ref_im,v_ref_re,v_ref_im,u_re,u_im,v_re,v_im,un_re,un_im,vn_re,vn_im\n"
      << std::setprecision(17);
  json rows = json::array();
  for (std::size_t n = 0; n < probes.size(); ++n) {
    const FieldPoint ref = fd.sample(probes[n].first, probes[n].second);
    const Reconstruction& r = recs[n];
    csv << probes[n].first << "," << probes[n].second;
    for (cplx z : {ref.u, ref.v, r.u, r.v, r.u_normalized, r.v_normalized})
      csv << "," << z.real() << "," << z.imag();
    csv << "\n";
    rows.push_back({{"x", probes[n].first},
                    {"t", probes[n].second},
                    {"region", region_name(r.region)},
                    {"ray_angle", r.ray_angle},
                    {"u_ref", cjson(ref.u)},
                    {"v_ref", cjson(ref.v)},
                    {"u", cjson(r.u)},
                    {"v", cjson(r.v)},
                    {"u_error_estimate", num(r.u_error)},
                    {"v_error_estimate", num(r.v_error)},
                    {"u_normalized", cjson(r.u_normalized)},
                    {"v_normalized", cjson(r.v_normalized)},
                    {"u_normalized_error_estimate", num(r.u_normalized_error)},
                    {"v_normalized_error_estimate", num(r.v_normalized_error)}});
  }
  write_text(s.out / "reconstruct_probes.csv", csv.str());
  write_report(s, "reconstruct", {{"probes", rows}, {"csv", "reconstruct_probes.csv"}});
  return kOk;
}

int classify(const std::exception& e) {
  std::cerr << "error: " << e.what() << "\n";
  if (dynamic_cast<const ConfigError*>(&e)) return kUsage;
  if (dynamic_cast<const SchemaError*>(&e)) return kSchema;
  if (dynamic_cast<const IoError*>(&e)) return kIo;
  if (dynamic_cast<const ParameterError*>(&e) || dynamic_cast<const GridError*>(&e) ||
      dynamic_cast<const CornerMismatchError*>(&e) || dynamic_cast<const DecayViolationError*>(&e) ||
      dynamic_cast<const CflError*>(&e) || dynamic_cast<const InteriorMissingError*>(&e) ||
      dynamic_cast<const OutOfDomainError*>(&e) || dynamic_cast<const DomainViolationError*>(&e) ||
      dynamic_cast<const RayCrossesBoundaryError*>(&e) ||
      dynamic_cast<const CircleLeavesRegionError*>(&e))
    return kPrecondition;
  return kNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unified-transform toolkit for coupled modified NLS on the half-line"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--config", o.config, "JSON config (defaults: see `cmnls defaults`)")
      ->check(CLI::ExistingFile);
  app.add_option("--dataset", o.dataset, "dataset JSON (generate: output path)");
  app.add_option("--out-dir", o.out_dir, "directory for reports and traces");
  app.add_option("--suite", o.suites, "verification suite (repeatable)")->allow_extra_args(false);
  app.add_option("--threads", o.threads, "OpenMP threads")->check(CLI::NonNegativeNumber);
  app.add_flag("--override-domain-guard", o.override_guard,
               "integrate columns outside their validity domain");

  std::function<int(const Options&)> run;
  auto sub = [&](const char* name, const char* help, int (*fn)(const Options&)) {
    app.add_subcommand(name, help)->callback([&run, fn] { run = fn; });
  };
  sub("generate", "solve the reference PDE and write a dataset", cmd_generate);
  sub("verify", "run verification suites", cmd_verify);
  sub("regions", "region raster and boundary curves", cmd_regions);
  sub("jumps", "jump matrices along region boundaries", cmd_jumps);
  sub("residues", "zero catalog and residue coefficients", cmd_residues);
  sub("global", "global relation residual sweep", cmd_global);
  sub("reconstruct", "recover u, v at probe points", cmd_reconstruct);
  app.add_subcommand("defaults", "print the default config")->callback([&run] {
    run = [](const Options&) {
      std::cout << default_config_text();
      return int(kOk);
    };
  });
  app.add_subcommand("suites", "list verification suites")->callback([&run] {
    run = [](const Options&) {
      for (const auto& s : suites()) std::cout << s.criterion << " " << s.name << "\n";
      return int(kOk);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }
  try {
    return run(o);
  } catch (const std::exception& e) {
    return classify(e);
  }
}
