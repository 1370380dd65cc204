#include "timeconsistent/json_util.hpp"

#include <algorithm>

#include "timeconsistent/error.hpp"

namespace tc::jsonu {

void config_error(const std::string& context, const std::string& what) {
  throw Error(ErrorKind::Config, "config", context + ": " + what);
}

void expect_object(const json& j, const std::string& context) {
  if (!j.is_object()) config_error(context, "expected a JSON object");
}

void check_keys(const json& j, std::initializer_list<std::string_view> allowed,
                const std::string& context) {
  expect_object(j, context);
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      config_error(context, "unknown key '" + key + "'");
  }
}

double number(const json& j, const std::string& key, const std::string& context) {
  expect_object(j, context);
  const auto it = j.find(key);
  if (it == j.end()) config_error(context, "missing required key '" + key + "'");
  if (!it->is_number()) config_error(context, "key '" + key + "' must be a number");
  return it->get<double>();
}

double number_or(const json& j, const std::string& key, double fallback,
                 const std::string& context) {
  if (!j.contains(key)) return fallback;
  return number(j, key, context);
}

long integer(const json& j, const std::string& key, const std::string& context) {
  expect_object(j, context);
  const auto it = j.find(key);
  if (it == j.end()) config_error(context, "missing required key '" + key + "'");
  if (!it->is_number_integer()) config_error(context, "key '" + key + "' must be an integer");
  return it->get<long>();
}

std::string string(const json& j, const std::string& key, const std::string& context) {
  expect_object(j, context);
  const auto it = j.find(key);
  if (it == j.end()) config_error(context, "missing required key '" + key + "'");
  if (!it->is_string()) config_error(context, "key '" + key + "' must be a string");
  return it->get<std::string>();
}

std::vector<double> numbers(const json& j, const std::string& key,
                            const std::string& context) {
  expect_object(j, context);
  const auto it = j.find(key);
  if (it == j.end()) config_error(context, "missing required key '" + key + "'");
  if (!it->is_array()) config_error(context, "key '" + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : *it) {
    if (!v.is_number()) config_error(context, "key '" + key + "' must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace tc::jsonu
