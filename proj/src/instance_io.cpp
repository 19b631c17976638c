#include "demandsig/instance_io.hpp"

#include <fstream>

namespace demandsig {

template <Scalar T>
T scalar_from_json(const json& j) {
  if (j.is_string()) return parse_scalar<T>(j.get<std::string>());
  if (j.is_number_integer()) return T(j.get<std::int64_t>());
  if (j.is_number()) {
    if constexpr (is_exact_v<T>) {
      return Rational(j.get<double>());
    } else {
      return j.get<double>();
    }
  }
  throw ValidationError("expected a number, got " + j.dump());
}

template <Scalar T>
json scalar_to_json(const T& v) {
  if constexpr (is_exact_v<T>) {
    return to_string(v);
  } else {
    return v;
  }
}

template <Scalar T>
std::vector<T> scalars_from_json(const json& j) {
  if (!j.is_array()) throw ValidationError("expected an array, got " + j.dump());
  std::vector<T> out;
  for (const auto& x : j) out.push_back(scalar_from_json<T>(x));
  return out;
}

template <Scalar T>
json scalars_to_json(const std::vector<T>& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(scalar_to_json(x));
  return out;
}

template <Scalar T>
Instance<T> instance_from_json(const json& j) {
  try {
    Instance<T> inst;
    inst.network.num_vertices = j.at("vertices").get<int>();
    inst.network.source = j.at("s").get<int>();
    inst.network.sink = j.at("t").get<int>();
    for (const auto& e : j.at("edges")) {
      Edge<T> edge;
      edge.tail = e.at("tail").get<int>();
      edge.head = e.at("head").get<int>();
      edge.cost.slope = scalar_from_json<T>(e.at("a"));
      edge.cost.offset = scalar_from_json<T>(e.at("b"));
      edge.cost.free = e.value("free", false);
      inst.network.edges.push_back(edge);
    }
    inst.states.demands = scalars_from_json<T>(j.at("demands"));
    if (j.contains("labels")) inst.states.labels = j.at("labels").get<std::vector<std::string>>();
    inst.prior = Belief<T>(scalars_from_json<T>(j.at("prior")));
    if (j.contains("scale")) inst.scale = scalar_from_json<T>(j.at("scale"));
    return inst;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed instance: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ValidationError(std::string("malformed instance: ") + e.what());
  }
}

template <Scalar T>
json instance_to_json(const Instance<T>& inst) {
  json edges = json::array();
  for (const auto& e : inst.network.edges) {
    json je = {{"tail", e.tail},
               {"head", e.head},
               {"a", scalar_to_json(e.cost.slope)},
               {"b", scalar_to_json(e.cost.offset)}};
    if (e.cost.free) je["free"] = true;
    edges.push_back(je);
  }
  json j = {{"vertices", inst.network.num_vertices},
            {"edges", edges},
            {"s", inst.network.source},
            {"t", inst.network.sink},
            {"demands", scalars_to_json(inst.states.demands)},
            {"prior", scalars_to_json(inst.prior.probabilities())}};
  if (!inst.states.labels.empty()) j["labels"] = inst.states.labels;
  if (inst.scale != T(1)) j["scale"] = scalar_to_json(inst.scale);
  return j;
}

template <Scalar T>
Instance<T> read_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return instance_from_json<T>(j);
}

#define DEMANDSIG_INSTANTIATE(T)                                    \
  template T scalar_from_json<T>(const json&);                      \
  template json scalar_to_json(const T&);                           \
  template std::vector<T> scalars_from_json<T>(const json&);        \
  template json scalars_to_json(const std::vector<T>&);             \
  template Instance<T> instance_from_json<T>(const json&);          \
  template json instance_to_json(const Instance<T>&);               \
  template Instance<T> read_instance<T>(const std::filesystem::path&);

DEMANDSIG_INSTANTIATE(double)
DEMANDSIG_INSTANTIATE(Rational)

}  // namespace demandsig
