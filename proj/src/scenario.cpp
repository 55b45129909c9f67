// Copyright 2026 qjt developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "scenario.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qjt::scenario {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ValidationError(path, msg);
}

const json& need(const json& j, const char* key, const std::string& path) {
  const auto it = j.find(key);
  if (it == j.end()) fail(path + "." + key, "missing required field");
  return *it;
}

double need_number(const json& j, const char* key, const std::string& path) {
  const json& v = need(j, key, path);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  return v.get<double>();
}

long long need_integer(const json& j, const char* key, const std::string& path) {
  const json& v = need(j, key, path);
  if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
  return v.get<long long>();
}

std::string need_string(const json& j, const char* key, const std::string& path) {
  const json& v = need(j, key, path);
  if (!v.is_string()) fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

Complex parse_complex(const json& v, const std::string& path) {
  if (v.is_number()) return Complex(v.get<double>(), 0.0);
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return Complex(v[0].get<double>(), v[1].get<double>());
  }
  fail(path, "expected a number or an [re, im] pair");
}

Matrix shorthand_matrix(const std::string& name, int dim, const std::string& path) {
  if (name == "identity") {
    if (dim <= 0) fail(path, "'identity' needs a known dimension");
    return Matrix::Identity(dim, dim);
  }
  if (name == "zero") {
    if (dim <= 0) fail(path, "'zero' needs a known dimension");
    return Matrix::Zero(dim, dim);
  }
  Matrix out;
  if (name == "sigma_x") out = qops::pauli_x();
  else if (name == "sigma_y") out = qops::pauli_y();
  else if (name == "sigma_z") out = qops::pauli_z();
  else if (name == "sigma_plus") out = qops::sigma_plus();
  else if (name == "sigma_minus") out = qops::sigma_minus();
  else if (name == "P0") out = qops::projector_ground();
  else if (name == "P1") out = qops::projector_excited();
  else fail(path, "unknown operator shorthand '" + name + "'");
  if (dim > 0 && dim != 2) fail(path, "'" + name + "' is a 2x2 shorthand");
  return out;
}

// Matrices are row-major nested arrays of complex entries, or a shorthand
// string, optionally scaled via {"scale": s, "op": ...}.
Matrix parse_matrix(const json& v, int dim, const std::string& path) {
  if (v.is_string()) return shorthand_matrix(v.get<std::string>(), dim, path);
  if (v.is_object()) {
    const double scale = need_number(v, "scale", path);
    return scale * parse_matrix(need(v, "op", path), dim, path + ".op");
  }
  if (!v.is_array() || v.empty()) fail(path, "expected a matrix");
  const int rows = static_cast<int>(v.size());
  if (dim > 0 && rows != dim) {
    fail(path, "expected " + std::to_string(dim) + " rows, got " + std::to_string(rows));
  }
  Matrix out(rows, rows);
  for (int i = 0; i < rows; ++i) {
    const json& row = v[i];
    if (!row.is_array() || static_cast<int>(row.size()) != rows) {
      fail(path + "[" + std::to_string(i) + "]", "expected a square row-major matrix");
    }
    for (int j = 0; j < rows; ++j) {
      out(i, j) = parse_complex(row[j], path + "[" + std::to_string(i) + "][" +
                                            std::to_string(j) + "]");
    }
  }
  return out;
}

std::vector<Matrix> parse_matrix_list(const json& v, int dim, const std::string& path) {
  if (!v.is_array()) fail(path, "expected a list of matrices");
  std::vector<Matrix> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(parse_matrix(v[i], dim, path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

LawSpec parse_law(const json& v, const std::string& path) {
  LawSpec law;
  law.kind = need_string(v, "kind", path);
  if (law.kind == "exponential" || law.kind == "erlang2") {
    law.lambda = need_number(v, "lambda", path);
    if (!(law.lambda > 0.0)) fail(path + ".lambda", "must be > 0");
  } else if (law.kind == "table") {
    const json& times = need(v, "times", path);
    const json& density = need(v, "density", path);
    if (!times.is_array() || !density.is_array()) {
      fail(path, "table law needs 'times' and 'density' arrays");
    }
    for (const auto& x : times) law.times.push_back(x.get<double>());
    for (const auto& x : density) law.density.push_back(x.get<double>());
  } else {
    fail(path + ".kind", "unknown law kind '" + law.kind + "'");
  }
  return law;
}

json law_to_json(const LawSpec& law) {
  json out;
  out["kind"] = law.kind;
  if (law.kind == "table") {
    out["times"] = law.times;
    out["density"] = law.density;
  } else {
    out["lambda"] = law.lambda;
  }
  return out;
}

json complex_to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json matrix_list_to_json(const std::vector<Matrix>& ms) {
  json out = json::array();
  for (const auto& m : ms) out.push_back(matrix_to_json(m));
  return out;
}

ModelSpec parse_model(const json& v, const std::string& path) {
  const std::string type = need_string(v, "type", path);
  if (type == "generic_jump") {
    GenericJumpSpec spec;
    spec.dim = static_cast<int>(need_integer(v, "dim", path));
    if (spec.dim < 1) fail(path + ".dim", "must be >= 1");
    spec.hamiltonian = v.contains("hamiltonian")
                           ? parse_matrix(v["hamiltonian"], spec.dim, path + ".hamiltonian")
                           : Matrix::Zero(spec.dim, spec.dim);
    if (v.contains("lindblads")) {
      spec.lindblads = parse_matrix_list(v["lindblads"], spec.dim, path + ".lindblads");
    }
    const json& channels = need(v, "jump_channels", path);
    if (!channels.is_array() || channels.empty()) {
      fail(path + ".jump_channels", "at least one labeled channel is required");
    }
    for (std::size_t i = 0; i < channels.size(); ++i) {
      const std::string cpath = path + ".jump_channels[" + std::to_string(i) + "]";
      GenericJumpSpec::Channel ch;
      ch.label = need_string(channels[i], "label", cpath);
      ch.rate = need_number(channels[i], "rate", cpath);
      if (!(ch.rate > 0.0)) fail(cpath + ".rate", "must be > 0");
      ch.kraus = parse_matrix_list(need(channels[i], "kraus", cpath), spec.dim,
                                   cpath + ".kraus");
      spec.channels.push_back(std::move(ch));
    }
    return spec;
  }
  if (type == "effective_nh") {
    EffectiveNhSpec spec;
    spec.h_eff = parse_matrix(need(v, "h_eff", path), -1, path + ".h_eff");
    if (v.contains("c_policy")) {
      const json& c = v["c_policy"];
      if (c.is_string() && c.get<std::string>() == "auto") {
        spec.c.reset();
      } else if (c.is_number()) {
        spec.c = c.get<double>();
      } else {
        fail(path + ".c_policy", "expected \"auto\" or a number");
      }
    }
    return spec;
  }
  if (type == "interspersed") {
    InterspersedSpec spec;
    spec.dim = static_cast<int>(need_integer(v, "dim", path));
    const json& stages = need(v, "stages", path);
    if (!stages.is_array() || stages.empty()) {
      fail(path + ".stages", "at least one stage is required");
    }
    for (std::size_t s = 0; s < stages.size(); ++s) {
      const std::string spath = path + ".stages[" + std::to_string(s) + "]";
      InterspersedSpec::StageSpec stage;
      if (stages[s].contains("hamiltonian")) {
        stage.hamiltonian =
            parse_matrix(stages[s]["hamiltonian"], spec.dim, spath + ".hamiltonian");
      } else {
        stage.hamiltonian = Matrix::Zero(spec.dim, spec.dim);
      }
      if (stages[s].contains("lindblads")) {
        stage.lindblads =
            parse_matrix_list(stages[s]["lindblads"], spec.dim, spath + ".lindblads");
      }
      const json& instrument = need(stages[s], "instrument", spath);
      if (!instrument.is_array() || instrument.empty()) {
        fail(spath + ".instrument", "at least one labeled operation is required");
      }
      for (std::size_t i = 0; i < instrument.size(); ++i) {
        const std::string ipath = spath + ".instrument[" + std::to_string(i) + "]";
        InterspersedSpec::StageSpec::Op op;
        op.label = need_string(instrument[i], "label", ipath);
        op.weight = instrument[i].value("weight", 1.0);
        if (!(op.weight > 0.0)) fail(ipath + ".weight", "must be > 0");
        op.ops = parse_matrix_list(need(instrument[i], "ops", ipath), spec.dim,
                                   ipath + ".ops");
        stage.instrument.push_back(std::move(op));
      }
      spec.stages.push_back(std::move(stage));
    }
    const json& laws = need(v, "laws", path);
    if (!laws.is_array() || laws.empty()) fail(path + ".laws", "at least one law");
    for (std::size_t i = 0; i < laws.size(); ++i) {
      spec.laws.push_back(parse_law(laws[i], path + ".laws[" + std::to_string(i) + "]"));
    }
    return spec;
  }
  if (type == "revival") {
    RevivalSpec spec;
    spec.law = parse_law(need(v, "law", path), path + ".law");
    return spec;
  }
  if (type == "walk") {
    WalkSpec spec;
    spec.dim = static_cast<int>(need_integer(v, "dim", path));
    const json& vertices = need(v, "vertices", path);
    if (!vertices.is_array() || vertices.empty()) {
      fail(path + ".vertices", "at least one vertex is required");
    }
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      const json& coords = vertices[i];
      if (!coords.is_array() || coords.empty()) {
        fail(path + ".vertices[" + std::to_string(i) + "]",
             "expected a coordinate array");
      }
      Eigen::VectorXd x(coords.size());
      for (std::size_t d = 0; d < coords.size(); ++d) x(d) = coords[d].get<double>();
      spec.vertices.push_back(std::move(x));
    }
    const json& hs = need(v, "vertex_hamiltonians", path);
    if (!hs.is_array() || hs.size() != spec.vertices.size()) {
      fail(path + ".vertex_hamiltonians", "one Hamiltonian per vertex required");
    }
    for (std::size_t i = 0; i < hs.size(); ++i) {
      spec.vertex_hamiltonians.push_back(
          parse_matrix(hs[i], spec.dim,
                       path + ".vertex_hamiltonians[" + std::to_string(i) + "]"));
    }
    if (v.contains("vertex_lindblads")) {
      const json& ls = v["vertex_lindblads"];
      if (!ls.is_array() || ls.size() != spec.vertices.size()) {
        fail(path + ".vertex_lindblads", "one Lindblad list per vertex required");
      }
      for (std::size_t i = 0; i < ls.size(); ++i) {
        spec.vertex_lindblads.push_back(parse_matrix_list(
            ls[i], spec.dim, path + ".vertex_lindblads[" + std::to_string(i) + "]"));
      }
    }
    const json& labels = need(v, "labels", path);
    if (!labels.is_array() || labels.empty()) {
      fail(path + ".labels", "at least one label is required");
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const std::string lpath = path + ".labels[" + std::to_string(i) + "]";
      WalkSpec::Label label;
      label.name = need_string(labels[i], "name", lpath);
      label.rate = need_number(labels[i], "rate", lpath);
      const json& moves = need(labels[i], "moves", lpath);
      if (!moves.is_array()) fail(lpath + ".moves", "expected a list of moves");
      for (std::size_t m = 0; m < moves.size(); ++m) {
        const std::string mpath = lpath + ".moves[" + std::to_string(m) + "]";
        WalkSpec::Label::Move move;
        move.from = static_cast<int>(need_integer(moves[m], "from", mpath));
        move.to = static_cast<int>(need_integer(moves[m], "to", mpath));
        move.kraus =
            parse_matrix_list(need(moves[m], "kraus", mpath), spec.dim, mpath + ".kraus");
        label.moves.push_back(std::move(move));
      }
      spec.labels.push_back(std::move(label));
    }
    return spec;
  }
  if (type == "two_level_walk") {
    TwoLevelSpec spec;
    const std::string which = need_string(v, "case", path);
    if (which == "sigma_z") {
      spec.which = walk::TwoLevelCase::sigma_z;
    } else if (which == "sigma_x") {
      spec.which = walk::TwoLevelCase::sigma_x;
    } else {
      fail(path + ".case", "expected \"sigma_z\" or \"sigma_x\"");
    }
    spec.omega0 = need_number(v, "omega0", path);
    spec.omega1 = need_number(v, "omega1", path);
    spec.nu0 = need_number(v, "nu0", path);
    spec.nu1 = need_number(v, "nu1", path);
    return spec;
  }
  fail(path + ".type", "unknown model type '" + type + "'");
}

json model_to_json(const ModelSpec& model) {
  json out;
  if (const auto* g = std::get_if<GenericJumpSpec>(&model)) {
    out["type"] = "generic_jump";
    out["dim"] = g->dim;
    out["hamiltonian"] = matrix_to_json(g->hamiltonian);
    if (!g->lindblads.empty()) out["lindblads"] = matrix_list_to_json(g->lindblads);
    json channels = json::array();
    for (const auto& ch : g->channels) {
      channels.push_back({{"label", ch.label},
                          {"rate", ch.rate},
                          {"kraus", matrix_list_to_json(ch.kraus)}});
    }
    out["jump_channels"] = std::move(channels);
  } else if (const auto* e = std::get_if<EffectiveNhSpec>(&model)) {
    out["type"] = "effective_nh";
    out["h_eff"] = matrix_to_json(e->h_eff);
    if (e->c) {
      out["c_policy"] = *e->c;
    } else {
      out["c_policy"] = "auto";
    }
  } else if (const auto* s = std::get_if<InterspersedSpec>(&model)) {
    out["type"] = "interspersed";
    out["dim"] = s->dim;
    json stages = json::array();
    for (const auto& stage : s->stages) {
      json js;
      js["hamiltonian"] = matrix_to_json(stage.hamiltonian);
      if (!stage.lindblads.empty()) {
        js["lindblads"] = matrix_list_to_json(stage.lindblads);
      }
      json instrument = json::array();
      for (const auto& op : stage.instrument) {
        instrument.push_back({{"label", op.label},
                              {"weight", op.weight},
                              {"ops", matrix_list_to_json(op.ops)}});
      }
      js["instrument"] = std::move(instrument);
      stages.push_back(std::move(js));
    }
    out["stages"] = std::move(stages);
    json laws = json::array();
    for (const auto& law : s->laws) laws.push_back(law_to_json(law));
    out["laws"] = std::move(laws);
  } else if (const auto* r = std::get_if<RevivalSpec>(&model)) {
    out["type"] = "revival";
    out["law"] = law_to_json(r->law);
  } else if (const auto* w = std::get_if<WalkSpec>(&model)) {
    out["type"] = "walk";
    out["dim"] = w->dim;
    json vertices = json::array();
    for (const auto& x : w->vertices) {
      json coords = json::array();
      for (Eigen::Index d = 0; d < x.size(); ++d) coords.push_back(x(d));
      vertices.push_back(std::move(coords));
    }
    out["vertices"] = std::move(vertices);
    out["vertex_hamiltonians"] = matrix_list_to_json(w->vertex_hamiltonians);
    if (!w->vertex_lindblads.empty()) {
      json ls = json::array();
      for (const auto& l : w->vertex_lindblads) ls.push_back(matrix_list_to_json(l));
      out["vertex_lindblads"] = std::move(ls);
    }
    json labels = json::array();
    for (const auto& label : w->labels) {
      json moves = json::array();
      for (const auto& move : label.moves) {
        moves.push_back({{"from", move.from},
                         {"to", move.to},
                         {"kraus", matrix_list_to_json(move.kraus)}});
      }
      labels.push_back(
          {{"name", label.name}, {"rate", label.rate}, {"moves", std::move(moves)}});
    }
    out["labels"] = std::move(labels);
  } else if (const auto* t = std::get_if<TwoLevelSpec>(&model)) {
    out["type"] = "two_level_walk";
    out["case"] = t->which == walk::TwoLevelCase::sigma_z ? "sigma_z" : "sigma_x";
    out["omega0"] = t->omega0;
    out["omega1"] = t->omega1;
    out["nu0"] = t->nu0;
    out["nu1"] = t->nu1;
  }
  return out;
}

}  // namespace

pointproc::RenewalLaw LawSpec::build() const {
  if (kind == "exponential") return pointproc::RenewalLaw::exponential(lambda);
  if (kind == "erlang2") return pointproc::RenewalLaw::erlang2(lambda);
  return pointproc::RenewalLaw::table(times, density);
}

Scenario parse(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError("(document)", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("(document)", "expected a JSON object");

  Scenario out;
  out.schema_version = need_string(doc, "schema_version", "");
  if (out.schema_version != "1") {
    fail(".schema_version", "unsupported schema version '" + out.schema_version + "'");
  }
  out.model = parse_model(need(doc, "model", ""), ".model");

  const json& init = need(doc, "initial_state", "");
  if (init.is_string()) {
    out.initial_name = init.get<std::string>();
  } else {
    out.initial_matrix = parse_matrix(init, -1, ".initial_state");
  }
  if (doc.contains("initial_vertex")) {
    out.initial_vertex = static_cast<int>(need_integer(doc, "initial_vertex", ""));
  }
  out.horizon = need_number(doc, "horizon", "");
  if (!(out.horizon > 0.0)) fail(".horizon", "must be > 0");
  if (doc.contains("trajectories")) {
    const long long n = need_integer(doc, "trajectories", "");
    if (n < 1) fail(".trajectories", "must be >= 1");
    out.trajectories = static_cast<std::uint64_t>(n);
  }
  if (doc.contains("seed")) {
    out.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    out.grid.t0 = need_number(g, "t0", ".grid");
    out.grid.t1 = need_number(g, "t1", ".grid");
    out.grid.steps = static_cast<int>(need_integer(g, "steps", ".grid"));
    if (out.grid.steps < 1) fail(".grid.steps", "must be >= 1");
    if (!(out.grid.t1 > out.grid.t0) || out.grid.t0 < 0.0) {
      fail(".grid", "need 0 <= t0 < t1");
    }
    out.grid.present = true;
  }
  if (doc.contains("counts")) {
    const json& c = doc["counts"];
    out.counts.time = need_number(c, "time", ".counts");
    out.counts.m_max = static_cast<int>(need_integer(c, "m_max", ".counts"));
    if (out.counts.time < 0.0) fail(".counts.time", "must be >= 0");
    if (out.counts.m_max < 0) fail(".counts.m_max", "must be >= 0");
  }
  if (doc.contains("trajectory")) {
    const json& t = doc["trajectory"];
    if (!t.is_array()) fail(".trajectory", "expected a list of [label, time] pairs");
    double last = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const json& ev = t[i];
      const std::string epath = ".trajectory[" + std::to_string(i) + "]";
      if (!ev.is_array() || ev.size() != 2 || !ev[0].is_string() || !ev[1].is_number()) {
        fail(epath, "expected [label, time]");
      }
      const double time = ev[1].get<double>();
      if (!(time > last)) fail(epath, "jump times must be strictly increasing and > 0");
      if (!(time < out.horizon)) fail(epath, "jump time must be before the horizon");
      last = time;
      out.trajectory.events.push_back({ev[0].get<std::string>(), time});
    }
    out.trajectory.present = true;
  }
  if (doc.contains("outputs")) {
    const json& o = doc["outputs"];
    if (!o.is_array()) fail(".outputs", "expected a list of table names");
    for (const auto& name : o) out.outputs.push_back(name.get<std::string>());
  }
  return out;
}

Scenario load(const std::string& path) {
  std::ifstream stream(path);
  if (!stream) throw IoError("cannot open scenario file '" + path + "'");
  std::stringstream buffer;
  buffer << stream.rdbuf();
  return parse(buffer.str());
}

std::string serialize(const Scenario& scenario) {
  json doc;
  doc["schema_version"] = scenario.schema_version;
  doc["model"] = model_to_json(scenario.model);
  if (!scenario.initial_name.empty()) {
    doc["initial_state"] = scenario.initial_name;
  } else if (scenario.initial_matrix) {
    doc["initial_state"] = matrix_to_json(*scenario.initial_matrix);
  }
  doc["initial_vertex"] = scenario.initial_vertex;
  doc["horizon"] = scenario.horizon;
  doc["trajectories"] = scenario.trajectories;
  doc["seed"] = scenario.seed;
  if (scenario.grid.present) {
    doc["grid"] = {{"t0", scenario.grid.t0},
                   {"t1", scenario.grid.t1},
                   {"steps", scenario.grid.steps}};
  }
  doc["counts"] = {{"time", scenario.counts.time}, {"m_max", scenario.counts.m_max}};
  if (scenario.trajectory.present) {
    json t = json::array();
    for (const auto& ev : scenario.trajectory.events) {
      t.push_back(json::array({ev.label, ev.time}));
    }
    doc["trajectory"] = std::move(t);
  }
  if (!scenario.outputs.empty()) doc["outputs"] = scenario.outputs;
  return doc.dump(2) + "\n";
}

namespace {

qops::DensityOperator named_state(const std::string& name, const Built& built,
                                  int dim) {
  if (name == "P0") {
    if (dim != 2) fail(".initial_state", "'P0' is a two-level state");
    return qops::DensityOperator::create(qops::projector_ground());
  }
  if (name == "P1") {
    if (dim != 2) fail(".initial_state", "'P1' is a two-level state");
    return qops::DensityOperator::create(qops::projector_excited());
  }
  if (name == "plus") {
    if (dim != 2) fail(".initial_state", "'plus' is a two-level state");
    Vector v(2);
    v << 1.0, 1.0;
    return qops::pure_state(v);
  }
  if (name == "phi0" || name == "phi1") {
    if (!built.c2) {
      fail(".initial_state",
           "'" + name + "' requires a two-level effective_nh model");
    }
    const auto basis = nonh::ep_basis(*built.c2);  // throws outside the EP regime
    return qops::pure_state(name == "phi0" ? basis.phi0 : basis.phi1);
  }
  fail(".initial_state", "unknown named state '" + name + "'");
}

}  // namespace

const qops::JumpModel& Built::require_jump_model() const {
  if (jump_model) return *jump_model;
  if (embedded) return *embedded;
  throw ModelError("this operation needs a jump-model view of the scenario, "
                   "which the configured model does not provide");
}

const qops::DensityOperator& Built::jump_model_initial() const {
  if (jump_model) return initial;
  if (embedded) return *embedded_initial;
  throw ModelError("no jump-model view available");
}

Built build(const Scenario& scenario) {
  Built built;
  try {
    if (const auto* g = std::get_if<GenericJumpSpec>(&scenario.model)) {
      built.kind = Built::Kind::generic;
      std::vector<qops::JumpChannel> channels;
      for (const auto& ch : g->channels) {
        channels.push_back({ch.label, ch.rate, qops::QuantumChannel::create(ch.kraus)});
      }
      built.jump_model =
          qops::JumpModel::create(g->hamiltonian, g->lindblads, std::move(channels));
    } else if (const auto* e = std::get_if<EffectiveNhSpec>(&scenario.model)) {
      built.kind = Built::Kind::effective_nh;
      built.effective = nonh::decompose(e->h_eff, e->c);
      if (e->h_eff.rows() == 2) {
        built.c2 = nonh::c2_parametrize(built.effective->h_eff, built.effective->c);
      }
      built.jump_model = nonh::to_jump_model(*built.effective);
    } else if (const auto* s = std::get_if<InterspersedSpec>(&scenario.model)) {
      built.kind = Built::Kind::interspersed;
      std::vector<renewal::Stage> stages;
      for (const auto& stage_spec : s->stages) {
        renewal::Stage stage;
        stage.hamiltonian = stage_spec.hamiltonian;
        stage.lindblads = stage_spec.lindblads;
        for (const auto& op : stage_spec.instrument) {
          stage.instrument.push_back({op.label, op.weight, op.ops});
        }
        stages.push_back(std::move(stage));
      }
      std::vector<pointproc::RenewalLaw> laws;
      for (const auto& law : s->laws) laws.push_back(law.build());
      built.interspersed =
          renewal::build_interspersed(s->dim, std::move(stages), std::move(laws));
    } else if (const auto* r = std::get_if<RevivalSpec>(&scenario.model)) {
      built.kind = Built::Kind::revival;
      built.revival_law = r->law.build();
      built.interspersed = renewal::RevivalModel::create(*built.revival_law).model;
    } else if (const auto* w = std::get_if<WalkSpec>(&scenario.model)) {
      built.kind = Built::Kind::walk;
      std::vector<walk::WalkLabel> labels;
      for (const auto& label : w->labels) {
        walk::WalkLabel wl;
        wl.name = label.name;
        wl.rate = label.rate;
        for (const auto& move : label.moves) {
          wl.targets[move.from] = move.to;
          wl.kraus[move.from] = move.kraus;
        }
        labels.push_back(std::move(wl));
      }
      built.walk_model = walk::WalkModel::create(
          w->dim, w->vertices, w->vertex_hamiltonians, w->vertex_lindblads,
          std::move(labels));
    } else if (const auto* t = std::get_if<TwoLevelSpec>(&scenario.model)) {
      built.kind = Built::Kind::walk;
      built.walk_model =
          walk::two_level_example(t->which, t->omega0, t->omega1, t->nu0, t->nu1);
    }
  } catch (const ModelError& e) {
    throw ValidationError(".model", e.what());
  }

  int dim = 0;
  if (built.jump_model) dim = built.jump_model->dim;
  if (built.interspersed) dim = built.interspersed->dim;
  if (built.walk_model) dim = built.walk_model->dim;

  try {
    if (!scenario.initial_name.empty()) {
      built.initial = named_state(scenario.initial_name, built, dim);
    } else if (scenario.initial_matrix) {
      if (scenario.initial_matrix->rows() != dim) {
        fail(".initial_state", "dimension does not match the model");
      }
      built.initial = qops::DensityOperator::create(*scenario.initial_matrix);
    } else {
      fail(".initial_state", "missing");
    }
  } catch (const ModelError& e) {
    throw ValidationError(".initial_state", e.what());
  }

  if (built.walk_model) {
    if (scenario.initial_vertex < 0 ||
        scenario.initial_vertex >= built.walk_model->n_vertices()) {
      fail(".initial_vertex", "outside the vertex list");
    }
    built.initial_vertex = scenario.initial_vertex;
    if (built.walk_model->n_vertices() * built.walk_model->dim <=
        default_tolerances().dim_cap) {
      built.embedded = walk::to_jump_model(*built.walk_model);
      built.embedded_initial =
          walk::embed_state(*built.walk_model, {built.initial_vertex, built.initial});
    }
  }
  return built;
}

}  // namespace qjt::scenario
