#include "fsflow.h"

#include <cstring>
#include <string>

#include "fsflow/config.hpp"
#include "fsflow/experiments.hpp"
#include "fsflow/field.hpp"
#include "fsflow/report.hpp"

struct fsf_config {
    fsflow::SimConfig cfg;
};
struct fsf_report {
    fsflow::Report rep;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

} // namespace

extern "C" {

const char* fsf_version(void) { return "fsflow 1.0.0"; }

const char* fsf_last_error(void) { return g_last_error.c_str(); }

void fsf_string_free(char* s) { delete[] s; }

fsf_config* fsf_config_create(void) { return new fsf_config{}; }

void fsf_config_free(fsf_config* cfg) { delete cfg; }

fsf_status fsf_config_load(fsf_config* cfg, const char* path) {
    if (!cfg || !path) {
        set_error("null argument");
        return FSF_INVALID_ARGUMENT;
    }
    try {
        cfg->cfg = fsflow::parse_config(path);
        return FSF_OK;
    } catch (const std::exception& e) {
        set_error(e.what());
        return FSF_CONFIG_ERROR;
    }
}

fsf_status fsf_config_set(fsf_config* cfg, const char* key, const char* value) {
    if (!cfg || !key || !value) {
        set_error("null argument");
        return FSF_INVALID_ARGUMENT;
    }
    try {
        fsflow::apply_override(cfg->cfg, key, value);
        return FSF_OK;
    } catch (const std::exception& e) {
        set_error(e.what());
        return FSF_CONFIG_ERROR;
    }
}

fsf_status fsf_config_validate(fsf_config* cfg) {
    if (!cfg) {
        set_error("null argument");
        return FSF_INVALID_ARGUMENT;
    }
    try {
        fsflow::validate(cfg->cfg);
        return FSF_OK;
    } catch (const std::exception& e) {
        set_error(e.what());
        return FSF_CONFIG_ERROR;
    }
}

int fsf_config_num_warnings(const fsf_config* cfg) {
    return cfg ? static_cast<int>(cfg->cfg.warnings.size()) : 0;
}

const char* fsf_config_warning(const fsf_config* cfg, int i) {
    if (!cfg || i < 0 || i >= static_cast<int>(cfg->cfg.warnings.size())) return nullptr;
    return cfg->cfg.warnings[static_cast<std::size_t>(i)].c_str();
}

char* fsf_config_dump(const fsf_config* cfg) {
    if (!cfg) return nullptr;
    return dup_string(fsflow::dump_config(cfg->cfg));
}

fsf_status fsf_run_experiment(const fsf_config* cfg, const char* out_dir, fsf_report** out_report) {
    if (out_report) *out_report = nullptr;
    if (!cfg || !out_dir || !out_report) {
        set_error("null argument");
        return FSF_INVALID_ARGUMENT;
    }
    try {
        fsflow::Report rep = fsflow::run_experiment(cfg->cfg, out_dir);
        const bool pass = rep.all_pass();
        *out_report = new fsf_report{std::move(rep)};
        return pass ? FSF_OK : FSF_ASSERT_FAIL;
    } catch (const fsflow::DiffeoViolation& e) {
        set_error(e.what());
        return FSF_RUNTIME_ERROR;
    } catch (const fsflow::SingularSystem& e) {
        set_error(e.what());
        return FSF_RUNTIME_ERROR;
    } catch (const fsflow::IncompatibleData& e) {
        set_error(e.what());
        return FSF_RUNTIME_ERROR;
    } catch (const fsflow::PicardDivergence& e) {
        set_error(e.what());
        return FSF_RUNTIME_ERROR;
    } catch (const std::exception& e) {
        set_error(e.what());
        return FSF_CONFIG_ERROR;
    }
}

void fsf_report_free(fsf_report* rep) { delete rep; }

int fsf_report_all_pass(const fsf_report* rep) { return rep && rep->rep.all_pass() ? 1 : 0; }

int fsf_report_num_entries(const fsf_report* rep) {
    return rep ? static_cast<int>(rep->rep.entries.size()) : 0;
}

const char* fsf_report_entry_name(const fsf_report* rep, int i) {
    if (!rep || i < 0 || i >= static_cast<int>(rep->rep.entries.size())) return nullptr;
    return rep->rep.entries[static_cast<std::size_t>(i)].name.c_str();
}

double fsf_report_entry_value(const fsf_report* rep, int i) {
    if (!rep || i < 0 || i >= static_cast<int>(rep->rep.entries.size())) return 0.0;
    return rep->rep.entries[static_cast<std::size_t>(i)].value;
}

double fsf_report_entry_threshold(const fsf_report* rep, int i) {
    if (!rep || i < 0 || i >= static_cast<int>(rep->rep.entries.size())) return 0.0;
    return rep->rep.entries[static_cast<std::size_t>(i)].threshold;
}

int fsf_report_entry_pass(const fsf_report* rep, int i) {
    if (!rep || i < 0 || i >= static_cast<int>(rep->rep.entries.size())) return 0;
    return rep->rep.entries[static_cast<std::size_t>(i)].pass ? 1 : 0;
}

int fsf_report_num_artifacts(const fsf_report* rep) {
    return rep ? static_cast<int>(rep->rep.artifacts.size()) : 0;
}

const char* fsf_report_artifact(const fsf_report* rep, int i) {
    if (!rep || i < 0 || i >= static_cast<int>(rep->rep.artifacts.size())) return nullptr;
    return rep->rep.artifacts[static_cast<std::size_t>(i)].c_str();
}

char* fsf_report_text(const fsf_report* rep) {
    if (!rep) return nullptr;
    return dup_string(rep->rep.to_text());
}

} // extern "C"
