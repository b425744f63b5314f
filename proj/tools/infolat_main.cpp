#include <cstdio>
#include <exception>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "infolat/config.hpp"
#include "infolat/csv_writer.hpp"
#include "infolat/presets.hpp"
#include "infolat/runner.hpp"
#include "infolat/version.hpp"

namespace {

int fail(const char* cls, const std::string& message, int code) {
    std::fprintf(stderr, "error: %s: %s\n", cls, message.c_str());
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Information lattice toolkit for open fermion chains"};
    app.set_version_flag("--version", std::string(infolat::version_string));

    std::string task;
    std::string config_path;
    std::string preset;
    std::string out_dir = ".";
    app.add_option("task", task, "Task to run (ness | evolve | info_lattice | info_currents | "
                                 "noise_lattice | negativity | trajectories), or 'list' to "
                                 "print the preset catalog")
        ->required();
    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--preset", preset, "Named parameter preset");
    app.add_option("--out", out_dir, "Output directory (created if missing)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (task == "list") {
            const auto& aliases = infolat::preset_alias_map();
            for (const std::string& name : infolat::preset_names()) {
                if (const auto it = aliases.find(name); it != aliases.end()) {
                    std::printf("%s -> %s\n", name.c_str(), it->second.c_str());
                } else {
                    std::printf("%s\n", name.c_str());
                }
            }
            return 0;
        }

        nlohmann::json merged;
        if (!preset.empty()) {
            merged = infolat::preset_config(preset);
        }
        if (!config_path.empty()) {
            const nlohmann::json overlay = infolat::load_config_file(config_path);
            merged = preset.empty() ? overlay : infolat::merge_config(merged, overlay);
        }
        if (merged.is_null()) {
            throw infolat::ConfigError("no configuration given; pass --preset, --config, or both");
        }

        const infolat::ExperimentConfig cfg = infolat::parse_config(merged);
        const infolat::RunResult result = infolat::run_task(task, cfg, out_dir);
        for (const std::string& warning : result.warnings) {
            std::fprintf(stderr, "warning: %s\n", warning.c_str());
        }
        for (const std::string& name : result.outputs) {
            std::printf("%s\n", name.c_str());
        }
        return 0;
    } catch (const infolat::ConfigError& e) {
        return fail("config", e.what(), 2);
    } catch (const infolat::IoError& e) {
        return fail("io", e.what(), 3);
    } catch (const std::invalid_argument& e) {
        return fail("config", e.what(), 2);
    } catch (const std::out_of_range& e) {
        return fail("config", e.what(), 2);
    } catch (const std::domain_error& e) {
        return fail("config", e.what(), 2);
    } catch (const std::runtime_error& e) {
        return fail("numerical", e.what(), 4);
    } catch (const std::exception& e) {
        return fail("internal", e.what(), 1);
    }
}
