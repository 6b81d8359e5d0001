#include "hybridbn/network_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "hybridbn/assignment.hpp"
#include "hybridbn/errors.hpp"

namespace hbn {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, "cannot open file");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(origin, e.what());
  }
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where, std::string("missing field '") + key + "'");
  return *it;
}

double require_number(const json& j, const char* key, const std::string& where) {
  const json& v = require(j, key, where);
  if (!v.is_number()) throw ParseError(where, std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

std::vector<double> number_array(const json& j, const std::string& where,
                                 const std::string& what) {
  if (!j.is_array()) throw ParseError(where, what + " must be an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& x : j) {
    if (!x.is_number()) throw ParseError(where, what + " must hold numbers only");
    out.push_back(x.get<double>());
  }
  return out;
}

int state_index(const Variable& v, const std::string& name, const std::string& where) {
  for (int s = 0; s < v.cardinality; ++s) {
    if (v.state_names[s] == name) return s;
  }
  throw ParseError(where, "unknown state '" + name + "' of variable '" + v.name + "'");
}

// Position of a "given" discrete-parent assignment in row order (declaration
// order, last parent fastest).
std::size_t given_index(const HybridNetwork& net, const Cpd& cpd, const json& given,
                        const std::string& where) {
  std::vector<int> disc_parents;
  for (int p : cpd.parents) {
    if (net.var(p).is_discrete()) disc_parents.push_back(p);
  }
  if (!given.is_array() || given.size() != disc_parents.size()) {
    throw ParseError(where, "'given' must list one state per discrete parent (" +
                                std::to_string(disc_parents.size()) + " expected)");
  }
  std::size_t idx = 0;
  for (std::size_t i = 0; i < disc_parents.size(); ++i) {
    const Variable& p = net.var(disc_parents[i]);
    if (!given[i].is_string()) throw ParseError(where, "'given' must hold state names");
    idx = idx * static_cast<std::size_t>(p.cardinality) +
          static_cast<std::size_t>(state_index(p, given[i].get<std::string>(), where));
  }
  return idx;
}

std::size_t discrete_parent_blocks(const HybridNetwork& net, const Cpd& cpd) {
  std::size_t n = 1;
  for (int p : cpd.parents) {
    if (net.var(p).is_discrete()) n *= static_cast<std::size_t>(net.var(p).cardinality);
  }
  return n;
}

// State names of the discrete parents for a flattened block index.
json given_names(const HybridNetwork& net, const Cpd& cpd, std::size_t block) {
  std::vector<int> cards;
  std::vector<int> parents;
  for (int p : cpd.parents) {
    if (net.var(p).is_discrete()) {
      parents.push_back(p);
      cards.push_back(net.var(p).cardinality);
    }
  }
  std::vector<int> assign(cards.size());
  joint_unflatten(block, cards, assign);
  json out = json::array();
  for (std::size_t i = 0; i < parents.size(); ++i) {
    out.push_back(net.var(parents[i]).state_names[assign[i]]);
  }
  return out;
}

}  // namespace

HybridNetwork parse_network_json(const std::string& text, const std::string& origin,
                                 bool validate) {
  const json doc = parse_json(text, origin);
  if (!doc.is_object()) throw ParseError(origin, "top level must be an object");

  HybridNetwork net;
  const json& vars = require(doc, "variables", origin);
  if (!vars.is_array() || vars.empty()) {
    throw ParseError(origin, "'variables' must be a non-empty array");
  }
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const std::string where = origin + ": variables[" + std::to_string(i) + "]";
    const json& v = vars[i];
    if (!v.is_object()) throw ParseError(where, "must be an object");
    const json& name = require(v, "name", where);
    const json& kind = require(v, "kind", where);
    if (!name.is_string() || !kind.is_string()) {
      throw ParseError(where, "'name' and 'kind' must be strings");
    }
    if (kind == "discrete") {
      const json& states = require(v, "states", where);
      if (!states.is_array() || states.size() < 2) {
        throw ParseError(where, "'states' must list at least two state names");
      }
      std::vector<std::string> sn;
      for (const auto& s : states) {
        if (!s.is_string()) throw ParseError(where, "'states' must hold strings");
        sn.push_back(s.get<std::string>());
      }
      net.add_variable(Variable::discrete(static_cast<int>(i), name.get<std::string>(),
                                          std::move(sn)));
    } else if (kind == "continuous") {
      const json& range = require(v, "range", where);
      const auto r = number_array(range, where, "'range'");
      if (r.size() != 2) throw ParseError(where, "'range' must be [lower, upper]");
      net.add_variable(Variable::continuous(static_cast<int>(i), name.get<std::string>(),
                                            r[0], r[1]));
    } else {
      throw ParseError(where, "unknown kind '" + kind.get<std::string>() + "'");
    }
  }

  const json& cpds = require(doc, "cpds", origin);
  if (!cpds.is_array()) throw ParseError(origin, "'cpds' must be an array");
  std::vector<Cpd> parsed(net.variables.size());
  std::vector<char> have(net.variables.size(), 0);

  for (std::size_t i = 0; i < cpds.size(); ++i) {
    const std::string where0 = origin + ": cpds[" + std::to_string(i) + "]";
    const json& c = cpds[i];
    if (!c.is_object()) throw ParseError(where0, "must be an object");
    const json& child_name = require(c, "child", where0);
    if (!child_name.is_string()) throw ParseError(where0, "'child' must be a string");
    const auto child = net.find_variable(child_name.get<std::string>());
    if (!child) {
      throw ParseError(where0, "unknown child '" + child_name.get<std::string>() + "'");
    }
    const std::string where = origin + ": cpd of '" + child_name.get<std::string>() + "'";
    if (have[*child]) throw ParseError(where, "duplicate cpd");
    have[*child] = 1;

    Cpd cpd;
    cpd.child = *child;
    const json& parents = require(c, "parents", where);
    if (!parents.is_array()) throw ParseError(where, "'parents' must be an array");
    for (const auto& p : parents) {
      if (!p.is_string()) throw ParseError(where, "'parents' must hold variable names");
      const auto pid = net.find_variable(p.get<std::string>());
      if (!pid) throw ParseError(where, "unknown parent '" + p.get<std::string>() + "'");
      cpd.parents.push_back(*pid);
    }

    const json& kind = require(c, "kind", where);
    const std::size_t blocks = discrete_parent_blocks(net, cpd);
    if (kind == "table") {
      TableCpd t;
      t.rows.resize(blocks);
      std::vector<char> filled(blocks, 0);
      const json& rows = require(c, "rows", where);
      if (!rows.is_array()) throw ParseError(where, "'rows' must be an array");
      for (const auto& row : rows) {
        const std::size_t idx = given_index(net, cpd, require(row, "given", where), where);
        if (filled[idx]) throw ParseError(where, "duplicate row for the same 'given'");
        filled[idx] = 1;
        t.rows[idx] = number_array(require(row, "p", where), where, "'p'");
      }
      if (std::find(filled.begin(), filled.end(), 0) != filled.end()) {
        throw ParseError(where, "missing rows: need one per discrete parent assignment");
      }
      cpd.body = std::move(t);
    } else if (kind == "clg") {
      ClgCpd g;
      g.blocks.resize(blocks);
      std::vector<char> filled(blocks, 0);
      const json& bl = require(c, "blocks", where);
      if (!bl.is_array()) throw ParseError(where, "'blocks' must be an array");
      for (const auto& b : bl) {
        const std::size_t idx = given_index(net, cpd, require(b, "given", where), where);
        if (filled[idx]) throw ParseError(where, "duplicate block for the same 'given'");
        filled[idx] = 1;
        ClgBlock blk;
        blk.intercept = require_number(b, "intercept", where);
        blk.weights = number_array(require(b, "weights", where), where, "'weights'");
        blk.variance = require_number(b, "variance", where);
        g.blocks[idx] = std::move(blk);
      }
      if (std::find(filled.begin(), filled.end(), 0) != filled.end()) {
        throw ParseError(where, "missing blocks: need one per discrete parent assignment");
      }
      cpd.body = std::move(g);
    } else if (kind == "softmax") {
      SoftmaxCpd s;
      s.blocks.resize(blocks);
      std::vector<char> filled(blocks, 0);
      const json& bl = require(c, "blocks", where);
      if (!bl.is_array()) throw ParseError(where, "'blocks' must be an array");
      for (const auto& b : bl) {
        const std::size_t idx = given_index(net, cpd, require(b, "given", where), where);
        if (filled[idx]) throw ParseError(where, "duplicate block for the same 'given'");
        filled[idx] = 1;
        SoftmaxBlock blk;
        const json& regions = require(b, "regions", where);
        if (!regions.is_array() || regions.empty()) {
          throw ParseError(where, "'regions' must be a non-empty array");
        }
        for (const auto& r : regions) {
          SoftmaxRegion reg;
          reg.alpha = number_array(require(r, "alpha", where), where, "'alpha'");
          reg.p = number_array(require(r, "p", where), where, "'p'");
          blk.regions.push_back(std::move(reg));
        }
        s.blocks[idx] = std::move(blk);
      }
      if (std::find(filled.begin(), filled.end(), 0) != filled.end()) {
        throw ParseError(where, "missing blocks: need one per discrete parent assignment");
      }
      cpd.body = std::move(s);
    } else if (kind == "uniform") {
      cpd.body = UniformCpd{};
    } else {
      throw ParseError(where, "unknown cpd kind");
    }
    parsed[*child] = std::move(cpd);
  }

  for (std::size_t v = 0; v < have.size(); ++v) {
    if (!have[v]) {
      throw ParseError(origin, "variable '" + net.var(static_cast<int>(v)).name +
                                   "' has no cpd");
    }
  }
  for (auto& c : parsed) net.add_cpd(std::move(c));

  if (validate) {
    auto rep = validate_network(net);
    if (!rep.ok()) throw ParseError(origin, "invalid network:\n" + rep.to_string());
  }
  return net;
}

HybridNetwork load_network(const std::string& path, bool validate) {
  return parse_network_json(read_file(path), path, validate);
}

std::string network_to_json(const HybridNetwork& net) {
  json doc;
  doc["variables"] = json::array();
  for (const auto& v : net.variables) {
    json jv{{"name", v.name}};
    if (v.is_discrete()) {
      jv["kind"] = "discrete";
      jv["states"] = v.state_names;
    } else {
      jv["kind"] = "continuous";
      jv["range"] = {v.lower, v.upper};
    }
    doc["variables"].push_back(std::move(jv));
  }

  doc["cpds"] = json::array();
  for (const auto& cpd : net.cpds) {
    json jc{{"child", net.var(cpd.child).name}};
    json parents = json::array();
    for (int p : cpd.parents) parents.push_back(net.var(p).name);
    jc["parents"] = std::move(parents);
    switch (cpd.kind()) {
      case CpdKind::Table: {
        jc["kind"] = "table";
        const auto& t = std::get<TableCpd>(cpd.body);
        json rows = json::array();
        for (std::size_t j = 0; j < t.rows.size(); ++j) {
          rows.push_back({{"given", given_names(net, cpd, j)}, {"p", t.rows[j]}});
        }
        jc["rows"] = std::move(rows);
        break;
      }
      case CpdKind::Clg: {
        jc["kind"] = "clg";
        const auto& g = std::get<ClgCpd>(cpd.body);
        json bl = json::array();
        for (std::size_t j = 0; j < g.blocks.size(); ++j) {
          bl.push_back({{"given", given_names(net, cpd, j)},
                        {"intercept", g.blocks[j].intercept},
                        {"weights", g.blocks[j].weights},
                        {"variance", g.blocks[j].variance}});
        }
        jc["blocks"] = std::move(bl);
        break;
      }
      case CpdKind::Softmax: {
        jc["kind"] = "softmax";
        const auto& s = std::get<SoftmaxCpd>(cpd.body);
        json bl = json::array();
        for (std::size_t j = 0; j < s.blocks.size(); ++j) {
          json regions = json::array();
          for (const auto& r : s.blocks[j].regions) {
            regions.push_back({{"alpha", r.alpha}, {"p", r.p}});
          }
          bl.push_back({{"given", given_names(net, cpd, j)},
                        {"regions", std::move(regions)}});
        }
        jc["blocks"] = std::move(bl);
        break;
      }
      case CpdKind::Uniform:
        jc["kind"] = "uniform";
        break;
    }
    doc["cpds"].push_back(std::move(jc));
  }
  return doc.dump(2) + "\n";
}

void save_network(const HybridNetwork& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path, "cannot open file for writing");
  out << network_to_json(net);
}

Evidence parse_evidence_json(const HybridNetwork& net, const std::string& text,
                             const std::string& origin) {
  const json doc = parse_json(text, origin);
  if (!doc.is_object()) {
    throw ParseError(origin, "evidence must be an object mapping variables to values");
  }
  Evidence ev;
  for (const auto& [name, value] : doc.items()) {
    const auto id = net.find_variable(name);
    if (!id) throw ParseError(origin, "unknown variable '" + name + "'");
    const Variable& v = net.var(*id);
    double x;
    if (value.is_string()) {
      if (!v.is_discrete()) {
        throw ParseError(origin, "variable '" + name + "' is continuous; give a number");
      }
      x = static_cast<double>(state_index(v, value.get<std::string>(), origin));
    } else if (value.is_number()) {
      x = value.get<double>();
    } else {
      throw ParseError(origin, "value of '" + name + "' must be a number or state name");
    }
    if (!net.value_in_domain(*id, x)) {
      throw ParseError(origin, "value of '" + name + "' is outside the variable's domain");
    }
    ev.values[*id] = x;
  }
  return ev;
}

Evidence load_evidence(const HybridNetwork& net, const std::string& path) {
  return parse_evidence_json(net, read_file(path), path);
}

std::string evidence_to_json(const HybridNetwork& net, const Evidence& ev) {
  json doc = json::object();
  for (const auto& [id, value] : ev.values) {
    const Variable& v = net.var(id);
    if (v.is_discrete()) {
      doc[v.name] = v.state_names[static_cast<int>(value)];
    } else {
      doc[v.name] = value;
    }
  }
  return doc.dump(2) + "\n";
}

}  // namespace hbn
