#pragma once

// Strict readers for configuration objects: unknown keys and wrong types are
// configuration errors, never silently ignored.

#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace tc::jsonu {

using nlohmann::json;

void expect_object(const json& j, const std::string& context);

/// Rejects any key not in `allowed`.
void check_keys(const json& j, std::initializer_list<std::string_view> allowed,
                const std::string& context);

double number(const json& j, const std::string& key, const std::string& context);
double number_or(const json& j, const std::string& key, double fallback,
                 const std::string& context);
long integer(const json& j, const std::string& key, const std::string& context);
std::string string(const json& j, const std::string& key,
                   const std::string& context);
std::vector<double> numbers(const json& j, const std::string& key,
                            const std::string& context);

[[noreturn]] void config_error(const std::string& context, const std::string& what);

}  // namespace tc::jsonu
