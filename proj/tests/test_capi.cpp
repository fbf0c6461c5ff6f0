#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "fsflow.h"

TEST_CASE("config handle: set, dump, validate, errors") {
    fsf_config* cfg = fsf_config_create();
    REQUIRE(cfg != nullptr);
    CHECK(fsf_config_set(cfg, "dt", "0.05") == FSF_OK);
    CHECK(fsf_config_set(cfg, "no_such_key", "1") == FSF_CONFIG_ERROR);
    CHECK(std::string(fsf_last_error()).find("no_such_key") != std::string::npos);
    CHECK(fsf_config_set(cfg, "c_g", "-2") == FSF_OK);
    CHECK(fsf_config_validate(cfg) == FSF_CONFIG_ERROR);
    CHECK(fsf_config_set(cfg, "c_g", "1.0") == FSF_OK);
    CHECK(fsf_config_set(cfg, "q1", "2.31") == FSF_OK);
    CHECK(fsf_config_validate(cfg) == FSF_OK);
    CHECK(fsf_config_num_warnings(cfg) >= 1); // q1 above 2 + 2/9
    char* dump = fsf_config_dump(cfg);
    REQUIRE(dump != nullptr);
    CHECK(std::string(dump).find("dt = 0.05") != std::string::npos);
    fsf_string_free(dump);
    fsf_config_free(cfg);
}

TEST_CASE("config load reports missing files") {
    fsf_config* cfg = fsf_config_create();
    CHECK(fsf_config_load(cfg, "definitely_missing.cfg") == FSF_CONFIG_ERROR);
    fsf_config_free(cfg);
}

TEST_CASE("experiment round trip through the C API") {
    fsf_config* cfg = fsf_config_create();
    REQUIRE(fsf_config_set(cfg, "experiment", "duhamel-check") == FSF_OK);
    REQUIRE(fsf_config_set(cfg, "duhamel_nt", "24") == FSF_OK);
    const char* out_dir = "capi_test_out";
    std::filesystem::create_directories(out_dir);
    fsf_report* rep = nullptr;
    const fsf_status st = fsf_run_experiment(cfg, out_dir, &rep);
    REQUIRE(rep != nullptr);
    CHECK(st == FSF_OK);
    CHECK(fsf_report_all_pass(rep) == 1);
    CHECK(fsf_report_num_entries(rep) >= 5);
    bool found_named = false;
    for (int i = 0; i < fsf_report_num_entries(rep); ++i) {
        const char* name = fsf_report_entry_name(rep, i);
        REQUIRE(name != nullptr);
        if (std::string(name).find("max ratio") != std::string::npos) found_named = true;
        CHECK(fsf_report_entry_pass(rep, i) == 1);
    }
    CHECK(found_named);
    CHECK(fsf_report_num_artifacts(rep) == 1);
    CHECK(std::filesystem::exists(fsf_report_artifact(rep, 0)));
    char* text = fsf_report_text(rep);
    CHECK(std::string(text).find("RESULT: PASS") != std::string::npos);
    fsf_string_free(text);
    fsf_report_free(rep);
    fsf_config_free(cfg);
    std::filesystem::remove_all(out_dir);
}
