#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pinlab/config.hpp"
#include "pinlab/dispatch.hpp"
#include "pinlab/error.hpp"

namespace {

void print_keys()
{
    for (const auto& k : pinlab::config_schema())
        std::cout << k.name << " = " << k.fallback.value_or("<required>") << "    # " << k.doc << '\n';
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"pinlab: interface pinning laboratory"};
    app.require_subcommand(0, 1);
    bool list_keys = false;
    app.add_flag("--list-keys", list_keys, "print every configuration key with its default");

    std::string config_path;
    std::vector<std::string> overrides;
    for (const char* name : {"percolate", "cell", "build", "verify", "evolve", "scan"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("-c,--config", config_path, "flat key = value configuration file");
        sub->add_option("--set", overrides, "key=value override, repeatable");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : pinlab::exit_code::config;
    }
    if (list_keys) {
        print_keys();
        return 0;
    }
    if (app.get_subcommands().empty()) {
        std::cerr << app.help();
        return pinlab::exit_code::config;
    }
    const auto sub = pinlab::parse_subcommand(app.get_subcommands().front()->get_name());

    try {
        std::string text;
        if (!config_path.empty()) {
            std::ifstream is(config_path);
            if (!is) throw pinlab::ConfigError("cannot read config file " + config_path);
            std::ostringstream ss;
            ss << is.rdbuf();
            text = ss.str();
        }
        for (const auto& kv : overrides) text += "\n" + kv;
        auto cfg = pinlab::parse_config(text, sub);
        pinlab::apply_environment(cfg);
        return pinlab::dispatch(cfg, std::cout);
    } catch (const pinlab::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return pinlab::exit_code::config;
    }
}
