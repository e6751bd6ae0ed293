#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pinlab {

enum class Subcommand { percolate, cell, build, verify, evolve, scan };
enum class Format { csv, jsonl };

std::string_view to_string(Subcommand s);
std::optional<Subcommand> parse_subcommand(std::string_view name);

enum class KeyType { real, integer, boolean, text };

struct KeySpec {
    std::string name;
    KeyType type;
    // nullopt: required where listed in required_for
    std::optional<std::string> fallback;
    std::string doc;
    std::vector<Subcommand> required_for;
};

const std::vector<KeySpec>& config_schema();

// Resolved configuration. Values are stored in canonical text so that the
// manifest round-trips exactly.
class RunConfig {
public:
    Subcommand subcommand = Subcommand::build;

    double real(const std::string& key) const;
    long integer(const std::string& key) const;
    bool boolean(const std::string& key) const;
    const std::string& text(const std::string& key) const;
    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::uint64_t seed() const { return static_cast<std::uint64_t>(std::stoull(text("seed"))); }
    std::string output_dir() const { return text("output_dir"); }
    Format format() const { return text("format") == "jsonl" ? Format::jsonl : Format::csv; }
    std::size_t threads() const { return static_cast<std::size_t>(integer("threads")); }

    // validates and canonicalizes; throws ConfigError naming the key
    void set(const std::string& key, const std::string& value);
    const std::map<std::string, std::string>& values() const { return values_; }

    bool operator==(const RunConfig&) const = default;

private:
    std::map<std::string, std::string> values_;
};

// Flat `key = value` text with `#` comments. A `subcommand` key in the text
// must agree with the flag when both are given.
RunConfig parse_config(std::string_view text, std::optional<Subcommand> subcommand = std::nullopt);

// PINLAB_SEED replaces the configured seed when set.
void apply_environment(RunConfig& cfg);

std::string canonical_text(const RunConfig& cfg);
std::uint64_t config_hash(const RunConfig& cfg);
// canonical text preceded by comment lines naming the hash and outputs
std::string emit_manifest(const RunConfig& cfg, const std::vector<std::string>& outputs = {});

}  // namespace pinlab
