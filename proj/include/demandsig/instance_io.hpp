#pragma once

#include "demandsig/model.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>

namespace demandsig {

using nlohmann::json;

/// Numbers may be JSON numbers or strings such as "3/20" or "0.15".
template <Scalar T>
T scalar_from_json(const json& j);

/// Rationals are written as "p/q" strings, doubles as numbers.
template <Scalar T>
json scalar_to_json(const T& v);

template <Scalar T>
std::vector<T> scalars_from_json(const json& j);

template <Scalar T>
json scalars_to_json(const std::vector<T>& v);

/// {vertices, edges:[{tail, head, a, b, free?}], s, t, demands, prior, labels?, scale?}
template <Scalar T>
Instance<T> instance_from_json(const json& j);

template <Scalar T>
json instance_to_json(const Instance<T>& instance);

template <Scalar T>
Instance<T> read_instance(const std::filesystem::path& path);

}  // namespace demandsig
