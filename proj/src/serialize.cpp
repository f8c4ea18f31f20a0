#include "hlc/serialize.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hlc/error.hpp"

namespace hlc {

namespace {

template <class T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw DomainError(std::string("JSON: missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("JSON: field '") + key + "': " + e.what());
  }
}

template <class T>
T field_or(const Json& j, const char* key, T fallback) {
  return j.contains(key) ? field<T>(j, key) : fallback;
}

void expect_schema(const Json& j, const char* schema) {
  const auto s = field<std::string>(j, "schema");
  if (s != schema) throw DomainError("JSON: schema '" + s + "', expected '" + schema + "'");
}

std::string hex64(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

}  // namespace

Json matrix_to_json(const ComplexMatrix& m) {
  Json data = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) data.push_back({m(i, k).real(), m(i, k).imag()});
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

ComplexMatrix matrix_from_json(const Json& j) {
  const auto rows = field<long>(j, "rows");
  const auto cols = field<long>(j, "cols");
  const Json& data = j.at("data");
  if (rows < 0 || cols < 0 || !data.is_array() || static_cast<long>(data.size()) != rows * cols)
    throw DomainError("JSON: matrix data does not match its dimensions");
  ComplexMatrix m(rows, cols);
  for (long i = 0; i < rows; ++i)
    for (long k = 0; k < cols; ++k) {
      const Json& e = data[static_cast<std::size_t>(i * cols + k)];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        throw DomainError("JSON: matrix entries must be [re, im] pairs");
      m(i, k) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  return m;
}

Json density_to_json(const DensityMatrix& rho) {
  return {{"trace", rho.trace()}, {"matrix", matrix_to_json(rho.matrix())}};
}

DensityMatrix density_from_json(const Json& j) {
  return DensityMatrix(HermitianMatrix(matrix_from_json(j.at("matrix"))), field<double>(j, "trace"));
}

Json filters_to_json(const FilterPair& f) {
  return {{"f_a", matrix_to_json(f.f_a())}, {"f_b", matrix_to_json(f.f_b())}};
}

FilterPair filters_from_json(const Json& j) {
  return FilterPair(matrix_from_json(j.at("f_a")), matrix_from_json(j.at("f_b")));
}

Json measurement_set_to_json(const MeasurementSet& ms) {
  Json povms = Json::array();
  for (const auto& m : ms.povms()) {
    Json elems = Json::array();
    for (const auto& e : m.elements()) {
      const double w = e.trace();
      Json bloch = {0.0, 0.0, 0.0};
      if (w > 0.0)
        bloch = {(e.matrix() * pauli_x()).trace().real() / w, (e.matrix() * pauli_y()).trace().real() / w,
                 (e.matrix() * pauli_z()).trace().real() / w};
      elems.push_back({{"weight", w}, {"bloch", bloch}});
    }
    povms.push_back({{"label", m.label()}, {"elements", elems}});
  }
  return {{"id", ms.id()}, {"povms", povms}};
}

MeasurementSet measurement_set_from_json(const Json& j) {
  std::vector<Povm> povms;
  for (const Json& p : j.at("povms")) {
    std::vector<HermitianMatrix> elems;
    for (const Json& e : p.at("elements")) {
      const auto b = field<std::vector<double>>(e, "bloch");
      if (b.size() != 3) throw DomainError("JSON: Bloch vectors need three components");
      elems.emplace_back(bloch_operator(field<double>(e, "weight"), Eigen::Vector3d(b[0], b[1], b[2])), 1e-12);
    }
    povms.emplace_back(std::move(elems), field<std::string>(p, "label"));
  }
  return MeasurementSet(std::move(povms), field<std::string>(j, "id"));
}

Json report_to_json(const VerificationReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"pass", c.pass}});
  return {{"valid", r.valid}, {"certified", r.certified}, {"checks", checks}};
}

Json certificate_to_json(const LhsSdpCertificate& c, const MeasurementSet& ms) {
  Json sigmas = Json::array();
  for (const auto& s : c.sigma) sigmas.push_back(matrix_to_json(s));
  Json meta = Json::object();
  for (const auto& [k, v] : c.metadata) meta[k] = v;
  return {{"schema", kCertificateSchema},
          {"kind", "lhs-sdp"},
          {"theta", c.theta},
          {"eta", c.eta},
          {"p", c.p},
          {"xi_a", density_to_json(DensityMatrix(xi_state(c.p), 1.0))},
          {"measurement_set", c.measurement_set},
          {"measurements", measurement_set_to_json(ms)},
          {"eta_bound", c.eta_bound},
          {"eta_from_table", c.eta_from_table},
          {"q_star", c.q_certified},
          {"q_solver", c.q_solver},
          {"backoff", c.backoff},
          {"chi", matrix_to_json(c.chi)},
          {"sigmas", sigmas},
          {"strategies", c.strategies},
          {"backend", c.backend},
          {"mode", c.mode == SdpMode::Direct ? "direct" : "bisection"},
          {"iterations", c.iterations},
          {"relative_gap", c.relative_gap},
          {"strict_chi", c.strict_chi},
          {"metadata", meta},
          {"verification", report_to_json(verify_certificate(c, ms))}};
}

Json certificate_to_json(const DecompositionCertificate& c) {
  Json diag = Json::array();
  for (const auto& [k, v] : c.diagnostics) diag.push_back({k, v});
  return {{"schema", kCertificateSchema},
          {"kind", "decomposition"},
          {"technique", to_string(c.technique)},
          {"target", {{"alpha", c.target_alpha}, {"theta", c.target_theta}}},
          {"q", c.q},
          {"reference",
           {{"kind", to_string(c.reference.kind)},
            {"alpha", c.reference.alpha},
            {"theta", c.reference.theta},
            {"beta", c.reference.beta}}},
          {"no_remainder", c.no_remainder},
          {"s", matrix_to_json(c.s)},
          {"psd_margin", c.psd_margin},
          {"ppt_margin", c.ppt_margin},
          {"reconstruction_error", c.reconstruction_error},
          {"valid", c.valid},
          {"failure", c.failure},
          {"diagnostics", diag},
          {"verification", report_to_json(verify_decomposition(c))}};
}

namespace {

Technique technique_from(const std::string& s) {
  if (s == "I3") return Technique::I3;
  if (s == "LEMMA1") return Technique::Lemma1;
  if (s == "I1") return Technique::I1;
  throw DomainError("JSON: unknown technique '" + s + "'");
}

ReferenceKind reference_from(const std::string& s) {
  if (s == "werner5/12") return ReferenceKind::Werner512;
  if (s == "canonical") return ReferenceKind::Canonical;
  if (s == "rho_theta") return ReferenceKind::RhoTheta;
  throw DomainError("JSON: unknown reference kind '" + s + "'");
}

LoadedLhsCertificate lhs_from_json(const Json& j) {
  LhsSdpCertificate c;
  c.theta = field<double>(j, "theta");
  c.eta = field<double>(j, "eta");
  c.p = field<double>(j, "p");
  c.measurement_set = field<std::string>(j, "measurement_set");
  c.eta_bound = field<double>(j, "eta_bound");
  c.eta_from_table = field<bool>(j, "eta_from_table");
  c.q_certified = field<double>(j, "q_star");
  c.q_solver = field_or<double>(j, "q_solver", c.q_certified);
  c.backoff = field_or<double>(j, "backoff", 0.0);
  c.chi = matrix_from_json(j.at("chi"));
  for (const Json& s : j.at("sigmas")) c.sigma.push_back(matrix_from_json(s));
  c.strategies = field<std::vector<std::vector<std::size_t>>>(j, "strategies");
  c.backend = field_or<std::string>(j, "backend", "");
  c.mode = field_or<std::string>(j, "mode", "direct") == "bisection" ? SdpMode::Bisection : SdpMode::Direct;
  c.iterations = field_or<int>(j, "iterations", 0);
  c.relative_gap = field_or<double>(j, "relative_gap", 0.0);
  c.strict_chi = field_or<bool>(j, "strict_chi", false);
  if (j.contains("metadata"))
    for (const auto& [k, v] : j.at("metadata").items()) c.metadata.emplace_back(k, v.get<std::string>());
  return {std::move(c), measurement_set_from_json(j.at("measurements"))};
}

DecompositionCertificate decomposition_from_json(const Json& j) {
  DecompositionCertificate c;
  c.technique = technique_from(field<std::string>(j, "technique"));
  const Json& t = j.at("target");
  c.target_alpha = field<double>(t, "alpha");
  c.target_theta = field<double>(t, "theta");
  c.q = field<double>(j, "q");
  const Json& r = j.at("reference");
  c.reference = {reference_from(field<std::string>(r, "kind")), field<double>(r, "alpha"), field<double>(r, "theta"),
                 field<double>(r, "beta")};
  c.no_remainder = field<bool>(j, "no_remainder");
  c.s = matrix_from_json(j.at("s"));
  c.psd_margin = field<double>(j, "psd_margin");
  c.ppt_margin = field<double>(j, "ppt_margin");
  c.reconstruction_error = field<double>(j, "reconstruction_error");
  c.valid = field<bool>(j, "valid");
  c.failure = field<std::string>(j, "failure");
  for (const Json& d : j.at("diagnostics")) c.diagnostics.emplace_back(d.at(0).get<std::string>(), d.at(1).get<double>());
  return c;
}

}  // namespace

AnyCertificate certificate_from_json(const Json& j) {
  expect_schema(j, kCertificateSchema);
  const auto kind = field<std::string>(j, "kind");
  if (kind == "lhs-sdp") return lhs_from_json(j);
  if (kind == "decomposition") return decomposition_from_json(j);
  throw DomainError("JSON: unknown certificate kind '" + kind + "'");
}

VerificationReport verify_any(const AnyCertificate& any) {
  if (const auto* d = std::get_if<DecompositionCertificate>(&any)) return verify_decomposition(*d);
  const auto& l = std::get<LoadedLhsCertificate>(any);
  if (l.measurements.id() == "icosahedron") {
    // The published shrinking factor belongs to the built-in set only.
    const MeasurementSet ref = icosahedron_set();
    double diff = l.measurements.size() == ref.size() ? 0.0 : 1.0;
    for (std::size_t x = 0; diff == 0.0 && x < ref.size(); ++x) {
      if (l.measurements[x].outcomes() != ref[x].outcomes()) {
        diff = 1.0;
        break;
      }
      for (std::size_t a = 0; a < ref[x].outcomes(); ++a)
        diff = std::max(diff, max_abs_distance(l.measurements[x].element(a).matrix(), ref[x].element(a).matrix()));
    }
    VerificationReport rep = verify_certificate(l.certificate, ref);
    rep.checks.insert(rep.checks.begin(), {"builtin_measurement_set", diff, 1e-12, diff <= 1e-12});
    rep.valid = rep.valid && diff <= 1e-12;
    rep.certified = rep.certified && rep.valid;
    return rep;
  }
  return verify_certificate(l.certificate, l.measurements);
}

Json config_to_json(const SweepConfig& c) {
  return {{"theta_s", c.theta_s},
          {"theta_l", c.theta_l},
          {"grid", c.grid},
          {"max_interp_loss", c.max_interp_loss},
          {"min_spacing", c.min_spacing},
          {"max_grid_points", c.max_grid_points},
          {"i1_points", c.i1_points},
          {"i3_points", c.i3_points},
          {"eta_source", to_string(c.eta_source)},
          {"p", c.p},
          {"p_mode", to_string(c.p_mode)},
          {"shrink_resolution", c.shrink_resolution},
          {"i1", {{"alpha", c.i1.alpha}, {"q", c.i1.q}, {"beta", c.i1.beta}}},
          {"enable", {{"i1", c.enable_i1}, {"i2", c.enable_i2}, {"i3", c.enable_i3}}},
          {"sdp",
           {{"mode", c.sdp.mode == SdpMode::Direct ? "direct" : "bisection"},
            {"strict_chi", c.sdp.strict_chi},
            {"gap_tol", c.sdp.solver.gap_tol},
            {"feas_tol", c.sdp.solver.feas_tol},
            {"max_iterations", c.sdp.solver.max_iterations}}}};
}

SweepConfig config_from_json(const Json& j) {
  SweepConfig c;
  c.theta_s = field<double>(j, "theta_s");
  c.theta_l = field<double>(j, "theta_l");
  c.grid = field<int>(j, "grid");
  c.max_interp_loss = field_or<double>(j, "max_interp_loss", c.max_interp_loss);
  c.min_spacing = field_or<double>(j, "min_spacing", c.min_spacing);
  c.max_grid_points = field_or<int>(j, "max_grid_points", c.max_grid_points);
  c.i1_points = field<int>(j, "i1_points");
  c.i3_points = field<int>(j, "i3_points");
  c.eta_source = field<std::string>(j, "eta_source") == "computed" ? EtaSource::Computed : EtaSource::Table;
  c.p = field<double>(j, "p");
  c.p_mode = field<std::string>(j, "p_mode") == "best" ? PMode::Best : PMode::Fixed;
  c.shrink_resolution = field<double>(j, "shrink_resolution");
  const Json& i1 = j.at("i1");
  c.i1 = {field<double>(i1, "alpha"), field<double>(i1, "q"), field<double>(i1, "beta")};
  const Json& en = j.at("enable");
  c.enable_i1 = field<bool>(en, "i1");
  c.enable_i2 = field<bool>(en, "i2");
  c.enable_i3 = field<bool>(en, "i3");
  const Json& s = j.at("sdp");
  c.sdp.mode = field<std::string>(s, "mode") == "bisection" ? SdpMode::Bisection : SdpMode::Direct;
  c.sdp.strict_chi = field<bool>(s, "strict_chi");
  c.sdp.solver.gap_tol = field<double>(s, "gap_tol");
  c.sdp.solver.feas_tol = field<double>(s, "feas_tol");
  c.sdp.solver.max_iterations = field<int>(s, "max_iterations");
  return c;
}

Json sweep_to_json(const SweepResult& r, bool with_timings) {
  const MeasurementSet ms = icosahedron_set();
  Json records = Json::array();
  for (const auto& rec : r.records)
    records.push_back({{"theta", rec.theta},
                       {"lo", rec.lo},
                       {"hi", rec.hi},
                       {"alpha_certified", rec.alpha_certified},
                       {"technique", rec.technique},
                       {"cert_kind", rec.cert_kind == CertKind::LhsSdp          ? "lhs-sdp"
                                     : rec.cert_kind == CertKind::Decomposition ? "decomposition"
                                                                                : "none"},
                       {"cert_index", rec.cert_index}});
  Json sdp = Json::array();
  for (const auto& c : r.sdp_certificates) sdp.push_back(certificate_to_json(c, ms));
  Json dec = Json::array();
  for (const auto& c : r.decompositions) dec.push_back(certificate_to_json(c));
  Json minima = Json::object();
  for (const auto& [k, v] : r.technique_minima) minima[k] = v;
  Json eta = Json::array();
  for (const auto& [p, e] : r.eta_used) eta.push_back({{"p", p}, {"eta", e}});

  Json out = {{"schema", kSweepSchema},
              {"config", config_to_json(r.config)},
              {"config_hash", hex64(r.config.hash())},
              {"records", records},
              {"sdp_certificates", sdp},
              {"decompositions", dec},
              {"alpha_c", r.alpha_c ? Json(*r.alpha_c) : Json(nullptr)},
              {"technique_minima", minima},
              {"certified", r.certified},
              {"eta_used", eta},
              {"refinement_capped", r.refinement_capped},
              {"metadata",
               {{"reported_alpha_c_high", SweepResult::kReportedAlphaCHigh},
                {"reported_alpha_c_low", SweepResult::kReportedAlphaCLow},
                {"note", "two different alpha_c values have been reported previously; alpha_c above is the "
                         "value certified by this run"}}}};
  if (with_timings)
    out["timings"] = {{"i1_seconds", r.timings.i1_seconds},
                      {"i2_seconds", r.timings.i2_seconds},
                      {"i3_seconds", r.timings.i3_seconds},
                      {"shrink_seconds", r.timings.shrink_seconds},
                      {"total_seconds", r.timings.total_seconds}};
  return out;
}

SweepResult sweep_from_json(const Json& j) {
  expect_schema(j, kSweepSchema);
  SweepResult r;
  r.config = config_from_json(j.at("config"));
  for (const Json& rec : j.at("records")) {
    const auto kind = field<std::string>(rec, "cert_kind");
    r.records.push_back({field<double>(rec, "theta"), field<double>(rec, "lo"), field<double>(rec, "hi"),
                         field<double>(rec, "alpha_certified"), field<std::string>(rec, "technique"),
                         kind == "lhs-sdp"         ? CertKind::LhsSdp
                         : kind == "decomposition" ? CertKind::Decomposition
                                                   : CertKind::None,
                         field<int>(rec, "cert_index")});
  }
  for (const Json& c : j.at("sdp_certificates")) {
    auto any = certificate_from_json(c);
    r.sdp_certificates.push_back(std::get<LoadedLhsCertificate>(any).certificate);
  }
  for (const Json& c : j.at("decompositions"))
    r.decompositions.push_back(std::get<DecompositionCertificate>(certificate_from_json(c)));
  if (!j.at("alpha_c").is_null()) r.alpha_c = j.at("alpha_c").get<double>();
  for (const auto& [k, v] : j.at("technique_minima").items()) r.technique_minima.emplace_back(k, v.get<double>());
  r.certified = field<bool>(j, "certified");
  for (const Json& e : j.at("eta_used")) r.eta_used.emplace_back(field<double>(e, "p"), field<double>(e, "eta"));
  r.refinement_capped = field_or<bool>(j, "refinement_capped", false);
  for (const auto& rec : r.records) {
    const std::size_t n = rec.cert_kind == CertKind::LhsSdp ? r.sdp_certificates.size() : r.decompositions.size();
    if (rec.cert_kind != CertKind::None && (rec.cert_index < 0 || static_cast<std::size_t>(rec.cert_index) >= n))
      throw DomainError("JSON: record references a missing certificate");
  }
  return r;
}

Json verdict_to_json(const VerdictReport& v) {
  Json out = {{"verdict", to_string(v.verdict)},
              {"alpha", v.alpha},
              {"theta", v.theta},
              {"success_probability", v.success_probability},
              {"certified_alpha", v.certified_alpha ? Json(*v.certified_alpha) : Json(nullptr)},
              {"chain", v.chain},
              {"reason", v.reason},
              {"sdp_certificate_index", v.sdp_certificate_index}};
  if (v.local_certificate) out["local_certificate"] = certificate_to_json(*v.local_certificate);
  return out;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error("write to '" + path + "' failed");
}

}  // namespace hlc
