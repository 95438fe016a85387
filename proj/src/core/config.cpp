/******************************************************************************
 * Project:  standage
 * Purpose:  Run configuration implementation.
 *
 * SPDX-License-Identifier: MIT
 ****************************************************************************/
#include "core/config.hpp"

#include <fstream>
#include <sstream>

namespace standage {

RunConfig RunConfig::load(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError("cannot open config file: " + path);

    RunConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line))
    {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        const std::string body = trim(line);
        if (body.empty())
            continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(line_no) +
                                  ": expected key = value, got '" + body +
                                  "' in " + path);
        const std::string key = trim(body.substr(0, eq));
        if (key.empty())
            throw ValidationError("config line " + std::to_string(line_no) +
                                  ": empty key in " + path);
        cfg.kv_[key] = trim(body.substr(eq + 1));
    }
    return cfg;
}

void RunConfig::set(const std::string &key, const std::string &value)
{
    kv_[trim(key)] = trim(value);
}

std::string RunConfig::get_string(const std::string &key) const
{
    const auto it = kv_.find(key);
    if (it == kv_.end())
        throw ValidationError("missing required config key '" + key + "'");
    return it->second;
}

std::string RunConfig::get_string(const std::string &key,
                                  const std::string &fallback) const
{
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

double RunConfig::get_double(const std::string &key) const
{
    double v;
    if (!parse_double(get_string(key), v))
        throw ValidationError("config key '" + key + "' is not numeric: '" +
                              get_string(key) + "'");
    return v;
}

double RunConfig::get_double(const std::string &key, double fallback) const
{
    if (!has(key))
        return fallback;
    return get_double(key);
}

long RunConfig::get_long(const std::string &key, long fallback) const
{
    if (!has(key))
        return fallback;
    long v;
    if (!parse_long(get_string(key), v))
        throw ValidationError("config key '" + key + "' is not an integer: '" +
                              get_string(key) + "'");
    return v;
}

std::uint64_t RunConfig::get_u64(const std::string &key,
                                 std::uint64_t fallback) const
{
    if (!has(key))
        return fallback;
    const std::string s = get_string(key);
    try
    {
        std::size_t pos = 0;
        const std::uint64_t v = std::stoull(s, &pos);
        if (pos != s.size())
            throw std::invalid_argument(s);
        return v;
    }
    catch (const std::exception &)
    {
        throw ValidationError("config key '" + key +
                              "' is not an unsigned integer: '" + s + "'");
    }
}

bool RunConfig::get_bool(const std::string &key, bool fallback) const
{
    if (!has(key))
        return fallback;
    const std::string v = lower(get_string(key));
    if (v == "1" || v == "true" || v == "yes" || v == "on")
        return true;
    if (v == "0" || v == "false" || v == "no" || v == "off")
        return false;
    throw ValidationError("config key '" + key + "' is not a boolean: '" +
                          get_string(key) + "'");
}

void RunConfig::merge_override(const RunConfig &other)
{
    for (const auto &[k, v] : other.kv_)
        kv_[k] = v;
}

std::string RunConfig::serialize() const
{
    std::ostringstream os;
    for (const auto &[k, v] : kv_)
        os << k << " = " << v << "\n";
    return os.str();
}

}  // namespace standage
