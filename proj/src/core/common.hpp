/******************************************************************************
 * Project:  standage
 * Purpose:  Shared error types and small string/number helpers.
 *
 * SPDX-License-Identifier: MIT
 ****************************************************************************/
#pragma once

#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace standage {

/** Bad input or configuration; the caller can fix it.  CLI exit code 2. */
class ValidationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/** Failure while processing otherwise valid input.  CLI exit code 1. */
class ProcessingError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/** A zonal query hit no usable cells. */
class EmptyZoneError : public ProcessingError {
  public:
    using ProcessingError::ProcessingError;
};

/** A model references a predictor the caller did not supply. */
class ModelInputError : public ProcessingError {
  public:
    using ProcessingError::ProcessingError;
};

/** The regression design matrix is rank deficient. */
class SingularDesignError : public ProcessingError {
  public:
    using ProcessingError::ProcessingError;
};

inline std::string format_g(double v, int significant_digits)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", significant_digits, v);
    return buf;
}

inline std::string trim(std::string_view s)
{
    const char *ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(ws);
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true)
    {
        const auto next = s.find(sep, pos);
        if (next == std::string_view::npos)
        {
            out.emplace_back(s.substr(pos));
            return out;
        }
        out.emplace_back(s.substr(pos, next - pos));
        pos = next + 1;
    }
}

inline std::string lower(std::string_view s)
{
    std::string out(s);
    for (char &c : out)
        if (c >= 'A' && c <= 'Z')
            c = static_cast<char>(c - 'A' + 'a');
    return out;
}

inline bool parse_double(std::string_view s, double &out)
{
    const std::string t = trim(s);
    if (t.empty())
        return false;
    char *end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size();
}

inline bool parse_long(std::string_view s, long &out)
{
    const std::string t = trim(s);
    if (t.empty())
        return false;
    char *end = nullptr;
    out = std::strtol(t.c_str(), &end, 10);
    return end == t.c_str() + t.size();
}

}  // namespace standage
