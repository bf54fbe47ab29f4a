// SPDX-License-Identifier: Apache-2.0
//
// hrisloc: joint user and hybrid-RIS localization toolkit
// Copyright (C) 2026 The hrisloc authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hrisloc/cli.hpp"

namespace {

struct Result
{
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args)
{
    args.insert(args.begin(), "hrisloc");
    std::vector<const char *> argv;
    for (const auto &a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = hrisloc::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string read_file(const std::filesystem::path &p)
{
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

std::filesystem::path temp_path(const std::string &name)
{
    return std::filesystem::temp_directory_path() / ("hrisloc_cli_" + name);
}

} // namespace

TEST_CASE("crb writes one CSV row")
{
    const auto path = temp_path("crb.csv");
    const Result r = invoke({"crb", "--scenario", "default", "--pb-dbm", "30", "--rho", "0.5", "-o", path.string()});
    REQUIRE(r.code == 0);
    std::istringstream lines(read_file(path));
    std::string header, row, extra;
    REQUIRE(std::getline(lines, header));
    REQUIRE(std::getline(lines, row));
    CHECK_FALSE(std::getline(lines, extra));
    CHECK(std::count(header.begin(), header.end(), ',') == 14);
    CHECK(std::count(row.begin(), row.end(), ',') == 14);
    CHECK(row.rfind("default,30,0.5,", 0) == 0);
    std::filesystem::remove(path);
}

TEST_CASE("run is reproducible for a fixed seed")
{
    const Result a = invoke({"run", "--seed", "7"});
    const Result b = invoke({"run", "--seed", "7"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.find("p_u ") != std::string::npos);
    CHECK(a.out.find("r_error_fro ") != std::string::npos);

    const auto dump = temp_path("obs.bin");
    const Result c = invoke({"run", "--seed", "7", "--dump", dump.string()});
    CHECK(c.code == 0);
    CHECK(c.out == a.out);
    CHECK(std::filesystem::file_size(dump) > 16);
    std::filesystem::remove(dump);
}

TEST_CASE("overrides change the scenario")
{
    const Result base = invoke({"crb"});
    const Result moved = invoke({"crb", "--override", "p_u=[6,2,1]"});
    REQUIRE(base.code == 0);
    REQUIRE(moved.code == 0);
    CHECK(base.out != moved.out);
}

TEST_CASE("usage and configuration errors exit with 1")
{
    const Result unknown_flag = invoke({"crb", "--bogus"});
    CHECK(unknown_flag.code == 1);
    CHECK(unknown_flag.err.find("Usage") != std::string::npos);

    CHECK(invoke({"bogus"}).code == 1);
    CHECK(invoke({}).code == 1);

    const Result bad_override = invoke({"crb", "--override", "no_such_key=1"});
    CHECK(bad_override.code == 1);
    CHECK(bad_override.err.find("rho") != std::string::npos);

    CHECK(invoke({"crb", "--rho", "1.5"}).code == 1);
    CHECK(invoke({"crb", "--scenario", "/nonexistent/scenario.json"}).code == 1);
    CHECK(invoke({"sweep-rho", "--values", "0,0.5"}).code == 1);
}

TEST_CASE("help exits with 0")
{
    const Result r = invoke({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("sweep-power") != std::string::npos);
}
