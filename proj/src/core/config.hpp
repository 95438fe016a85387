/******************************************************************************
 * Project:  standage
 * Purpose:  Run configuration: key=value files merged with command-line
 *           overrides.
 *
 * SPDX-License-Identifier: MIT
 ****************************************************************************/
#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "core/common.hpp"

namespace standage {

/**
 * Flat string map with typed accessors.  Values parsed from a file are
 * overridden by values set later (command-line flags win).  Typed getters
 * raise ValidationError naming the key on malformed values.
 */
class RunConfig
{
  public:
    static RunConfig load(const std::string &path);

    void set(const std::string &key, const std::string &value);
    bool has(const std::string &key) const { return kv_.count(key) != 0; }

    std::string get_string(const std::string &key) const;
    std::string get_string(const std::string &key,
                           const std::string &fallback) const;
    double get_double(const std::string &key) const;
    double get_double(const std::string &key, double fallback) const;
    long get_long(const std::string &key, long fallback) const;
    std::uint64_t get_u64(const std::string &key,
                          std::uint64_t fallback) const;
    bool get_bool(const std::string &key, bool fallback) const;

    /** Merge other into this; other's keys win. */
    void merge_override(const RunConfig &other);

    /** Sorted "key = value" lines. */
    std::string serialize() const;

    const std::map<std::string, std::string> &entries() const { return kv_; }

  private:
    std::map<std::string, std::string> kv_;
};

}  // namespace standage
