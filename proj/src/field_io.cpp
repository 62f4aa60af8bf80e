#include "cmnls/field_io.hpp"

#include <bit>
#include <boost/archive/iterators/base64_from_binary.hpp>
#include <boost/archive/iterators/binary_from_base64.hpp>
#include <boost/archive/iterators/transform_width.hpp>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>

#include "cmnls/errors.hpp"

namespace cmnls {

using nlohmann::json;

namespace {

static_assert(std::endian::native == std::endian::little,
              "base64 payloads assume a little-endian host");

json grid_json(const UniformGrid& g) {
  return {{"start", g.start}, {"step", g.step}, {"count", g.count}};
}

UniformGrid grid_from(const json& j) {
  UniformGrid g;
  g.start = j.at("start").get<double>();
  g.step = j.at("step").get<double>();
  g.count = j.at("count").get<std::size_t>();
  return g;
}

json array_json(const std::vector<cplx>& v, ComplexEncoding enc) {
  if (enc == ComplexEncoding::Base64) return encode_base64(v);
  json a = json::array();
  for (const auto& z : v) a.push_back({z.real(), z.imag()});
  return a;
}

std::vector<cplx> array_from(const json& j, std::size_t expected, const char* name) {
  std::vector<cplx> v;
  if (j.is_string()) {
    v = decode_base64(j.get<std::string>());
  } else if (j.is_array()) {
    v.reserve(j.size());
    for (const auto& p : j) {
      if (!p.is_array() || p.size() != 2) throw SchemaError(std::string(name) + ": bad pair");
      v.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
  } else {
    throw SchemaError(std::string(name) + ": expected base64 string or pair array");
  }
  if (v.size() != expected)
    throw SchemaError(std::string(name) + ": length " + std::to_string(v.size()) +
                      " does not match grid (" + std::to_string(expected) + ")");
  return v;
}

}  // namespace

std::string encode_base64(const std::vector<cplx>& v) {
  namespace it = boost::archive::iterators;
  using enc = it::base64_from_binary<it::transform_width<const char*, 6, 8>>;
  const auto* p = reinterpret_cast<const char*>(v.data());
  const std::size_t n = v.size() * sizeof(cplx);
  std::string out(enc(p), enc(p + n));
  out.append((3 - n % 3) % 3, '=');
  return out;
}

std::vector<cplx> decode_base64(const std::string& s) {
  namespace it = boost::archive::iterators;
  using dec = it::transform_width<it::binary_from_base64<std::string::const_iterator>, 8, 6>;
  std::size_t pad = 0;
  while (pad < s.size() && s[s.size() - 1 - pad] == '=') ++pad;
  if (s.size() % 4 != 0 || pad > 2) throw SchemaError("malformed base64 payload");
  std::string bytes;
  try {
    bytes.assign(dec(s.begin()), dec(s.end() - static_cast<long>(pad)));
  } catch (const std::exception& e) {
    throw SchemaError(std::string("malformed base64 payload: ") + e.what());
  }
  const std::size_t nbytes = s.size() / 4 * 3 - pad;
  bytes.resize(nbytes);
  if (nbytes % sizeof(cplx) != 0) throw SchemaError("base64 payload is not a complex array");
  std::vector<cplx> v(nbytes / sizeof(cplx));
  std::memcpy(v.data(), bytes.data(), nbytes);
  return v;
}

std::string field_data_to_json(const FieldData& fd, ComplexEncoding enc) {
  json j;
  j["format"] = "cmnls-fielddata";
  j["version"] = 1;
  j["params"] = {{"delta", fd.model.delta},
                 {"gamma", fd.model.gamma},
                 {"epsilon", fd.model.epsilon}};
  j["x_grid"] = grid_json(fd.x_grid);
  j["t_grid"] = grid_json(fd.t_grid);
  j["tolerances"] = {{"corner", fd.tolerances.corner}, {"decay", fd.tolerances.decay}};
  j["encoding"] = enc == ComplexEncoding::Base64 ? "base64" : "pairs";
  j["u0"] = array_json(fd.u0, enc);
  j["v0"] = array_json(fd.v0, enc);
  j["g0"] = array_json(fd.g0, enc);
  j["h0"] = array_json(fd.h0, enc);
  j["g1"] = array_json(fd.g1, enc);
  j["h1"] = array_json(fd.h1, enc);
  if (fd.interior)
    j["interior"] = {{"u", array_json(fd.interior->u, enc)},
                     {"v", array_json(fd.interior->v, enc)}};
  else
    j["interior"] = nullptr;
  j["metadata"] = fd.metadata;
  return j.dump(1);
}

FieldData field_data_from_json(const std::string& text) {
  FieldData fd;
  try {
    const json j = json::parse(text);
    if (j.value("format", "") != "cmnls-fielddata") throw SchemaError("not a cmnls dataset");
    if (j.value("version", 0) != 1) throw SchemaError("unsupported dataset version");
    const auto& p = j.at("params");
    fd.model.delta = p.at("delta").get<double>();
    fd.model.gamma = p.at("gamma").get<double>();
    fd.model.epsilon = p.at("epsilon").get<int>();
    fd.x_grid = grid_from(j.at("x_grid"));
    fd.t_grid = grid_from(j.at("t_grid"));
    fd.tolerances.corner = j.at("tolerances").at("corner").get<double>();
    fd.tolerances.decay = j.at("tolerances").at("decay").get<double>();
    const std::size_t nx = fd.x_grid.count, nt = fd.t_grid.count;
    fd.u0 = array_from(j.at("u0"), nx, "u0");
    fd.v0 = array_from(j.at("v0"), nx, "v0");
    fd.g0 = array_from(j.at("g0"), nt, "g0");
    fd.h0 = array_from(j.at("h0"), nt, "h0");
    fd.g1 = array_from(j.at("g1"), nt, "g1");
    fd.h1 = array_from(j.at("h1"), nt, "h1");
    if (!j.at("interior").is_null()) {
      FieldData::Interior in;
      in.u = array_from(j.at("interior").at("u"), nx * nt, "interior.u");
      in.v = array_from(j.at("interior").at("v"), nx * nt, "interior.v");
      fd.interior = std::move(in);
    }
    if (j.contains("metadata"))
      fd.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("dataset schema: ") + e.what());
  }
  try {
    fd.model.validate();
  } catch (const ParameterError& e) {
    throw SchemaError(std::string("dataset params: ") + e.what());
  }
  check_field_data(fd);
  return fd;
}

void save_field_data(const FieldData& fd, const std::string& path, ComplexEncoding enc) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << field_data_to_json(fd, enc) << '\n';
  if (!os) throw Error("write failed: " + path);
}

FieldData load_field_data(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open dataset " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return field_data_from_json(ss.str());
}

void write_trace_csv(const std::string& path, const std::string& coord_name,
                     const std::vector<double>& coord, const std::vector<std::string>& names,
                     const std::vector<std::vector<cplx>>& traces) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << coord_name;
  for (const auto& n : names) os << ',' << n << "_re," << n << "_im";
  os << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < coord.size(); ++i) {
    os << coord[i];
    for (const auto& tr : traces) os << ',' << tr.at(i).real() << ',' << tr.at(i).imag();
    os << '\n';
  }
}

}  // namespace cmnls
