// ptcav <command> --config <path> [--out <path>] [--set key=value ...]

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ptcav/commands.hpp"
#include "ptcav/config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Photon transfer in coupled gain/loss cavities"};
    std::string command;
    std::string config_path;
    std::string out_path;
    std::vector<std::string> sets;
    app.add_option("command", command,
                   "conventional-sweep | pt-sweep | bifurcation | dynamics | verify")
        ->required();
    app.add_option("--config", config_path, "key = value configuration file")->required();
    app.add_option("--out", out_path, "output file ('-' for stdout)");
    app.add_option("--set", sets, "override a configuration key (key=value)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : ptcav::exit_code::parse;
    }

    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
        std::cerr << "error kind=io detail=cannot read " << config_path << '\n';
        return ptcav::exit_code::failure;
    }
    std::stringstream text;
    text << in.rdbuf();

    try {
        std::vector<ptcav::KeyOverride> overrides;
        for (const auto& s : sets)
            overrides.push_back(ptcav::parse_override(s));
        overrides.emplace_back("command", command);
        if (!out_path.empty())
            overrides.emplace_back("output", out_path);
        const auto cfg = ptcav::parse_config(text.str(), overrides);
        return ptcav::run(cfg, std::cout, std::cerr);
    } catch (const ptcav::Error& e) {
        std::cerr << ptcav::error_record(e.kind(), e.what()) << '\n';
        return ptcav::exit_code_for(e.kind());
    }
}
