#include "runconfig.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "polyvar/error.hpp"
#include "polyvar/sobolev.hpp"

namespace polyvar::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    require(trim(v.substr(pos)).empty(), errc::config_error, "trailing characters");
    return x;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(errc::config_error, "bad number for " + key + ": '" + v + "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  const int i = static_cast<int>(x);
  require(x == i, errc::config_error, key + " must be an integer");
  return i;
}

std::vector<double> to_double_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
  require(!out.empty(), errc::config_error, key + " must list at least one number");
  return out;
}

std::vector<std::string> to_string_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

}  // namespace

void RunConfig::finalize() {
  require(n > 2 * k, errc::config_error, "requires n>2k");
  require(k >= 1, errc::config_error, "operator order k must be >= 1");
  if (kind == GeomKind::slab) radius = 1.0;

  if (lower_order.empty()) lower_order.assign(k, RadialProfile::constant(0.0));
  require(static_cast<int>(lower_order.size()) == k, errc::config_error,
          "need exactly k lower-order coefficients a0..a" + std::to_string(k - 1));

  const std::size_t ncomp = kind == GeomKind::ball ? 1 : 2;
  if (phi.empty()) phi.assign(ncomp, std::vector<double>(k, 0.0));
  require(phi.size() == ncomp, errc::config_error,
          "boundary data must cover every boundary component");
  for (const auto& c : phi)
    require(c.size() == static_cast<std::size_t>(k), errc::config_error,
            "boundary data arity must match k");

  const double two_sharp = SobolevParams(n, k).two_sharp();
  if (q) require(*q > 2.0 && *q <= two_sharp, errc::config_error, "q must lie in (2, 2#]");
  for (double qs : q_schedule)
    require(qs > 2.0 && qs < two_sharp, errc::config_error,
            "schedule exponents must lie within (2, 2#)");

  if (delta == 0.0) delta = radius / 4.0;
  if (cutoff_order == 0) cutoff_order = 2 * k + 1;
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::map<int, RadialProfile> a_entries;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      require(line.back() == ']', errc::config_error,
              "bad section header at line " + std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    require(eq != std::string::npos, errc::config_error,
            "expected key = value at line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (section == "geometry") {
      if (key == "kind") {
        if (value == "ball") cfg.kind = GeomKind::ball;
        else if (value == "slab") cfg.kind = GeomKind::slab;
        else fail(errc::config_error, "geometry kind must be ball or slab");
      } else if (key == "n") cfg.n = to_int(key, value);
      else if (key == "radius") cfg.radius = to_double(key, value);
      else if (key == "nodes") cfg.nodes = to_int(key, value);
      else fail(errc::config_error, "unknown geometry key '" + key + "'");
    } else if (section == "operator") {
      if (key == "k") cfg.k = to_int(key, value);
      else if (key == "f") cfg.f = RadialProfile::parse(value);
      else if (key.size() >= 2 && key[0] == 'a') {
        int idx = 0;
        try {
          idx = std::stoi(key.substr(1));
        } catch (const std::exception&) {
          fail(errc::config_error, "unknown operator key '" + key + "'");
        }
        a_entries[idx] = RadialProfile::parse(value);
      } else fail(errc::config_error, "unknown operator key '" + key + "'");
    } else if (section == "constraint") {
      if (key == "q") cfg.q = to_double(key, value);
      else if (key == "schedule") cfg.q_schedule = to_double_list(key, value);
      else if (key == "gamma") cfg.gamma = to_double(key, value);
      else if (key == "phi") {
        cfg.phi.resize(1);
        cfg.phi[0] = to_double_list(key, value);
      } else if (key == "phi_left" || key == "phi_right") {
        cfg.phi.resize(2);
        cfg.phi[key == "phi_left" ? 0 : 1] = to_double_list(key, value);
      } else fail(errc::config_error, "unknown constraint key '" + key + "'");
    } else if (section == "testfn") {
      if (key == "eps_list") cfg.eps_list = to_double_list(key, value);
      else if (key == "delta") cfg.delta = to_double(key, value);
      else if (key == "cutoff_order") cfg.cutoff_order = to_int(key, value);
      else fail(errc::config_error, "unknown testfn key '" + key + "'");
    } else if (section == "tolerances") {
      if (key == "el_tol") cfg.el_tol = to_double(key, value);
      else if (key == "constraint_tol") cfg.constraint_tol = to_double(key, value);
      else if (key == "max_iterations") cfg.max_iterations = to_int(key, value);
      else fail(errc::config_error, "unknown tolerances key '" + key + "'");
    } else if (section == "output") {
      if (key == "directory") cfg.directory = value;
      else if (key == "formats") cfg.formats = to_string_list(value);
      else fail(errc::config_error, "unknown output key '" + key + "'");
    } else {
      fail(errc::config_error, "unknown section '" + section + "'");
    }
  }

  if (!a_entries.empty()) {
    cfg.lower_order.assign(cfg.k, RadialProfile::constant(0.0));
    for (const auto& [idx, prof] : a_entries) {
      require(idx >= 0 && idx < cfg.k, errc::config_error,
              "coefficient a" + std::to_string(idx) + " out of range for k=" +
                  std::to_string(cfg.k));
      cfg.lower_order[idx] = prof;
    }
  }
  cfg.finalize();
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), errc::config_error, "cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string RunConfig::manifest_json() const {
  nlohmann::json j;
  j["geometry"]["kind"] = kind == GeomKind::ball ? "ball" : "slab";
  j["geometry"]["n"] = n;
  j["geometry"]["radius"] = radius;
  j["geometry"]["nodes"] = nodes;
  j["operator"]["k"] = k;
  for (int l = 0; l < k; ++l) j["operator"]["a" + std::to_string(l)] = lower_order[l].str();
  j["operator"]["f"] = f.str();
  if (q) j["constraint"]["q"] = *q;
  j["constraint"]["schedule"] = q_schedule;
  j["constraint"]["gamma"] = gamma;
  j["constraint"]["phi"] = phi;
  j["testfn"]["eps_list"] = eps_list;
  j["testfn"]["delta"] = delta;
  j["testfn"]["cutoff_order"] = cutoff_order;
  j["tolerances"]["el_tol"] = el_tol;
  j["tolerances"]["constraint_tol"] = constraint_tol;
  j["tolerances"]["max_iterations"] = max_iterations;
  j["output"]["directory"] = directory;
  j["output"]["formats"] = formats;
  return j.dump(2) + "\n";
}

}  // namespace polyvar::cli
