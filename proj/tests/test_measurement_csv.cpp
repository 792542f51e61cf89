#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "gridfuse/error.hpp"
#include "gridfuse/measurement_csv.hpp"

using namespace gridfuse;

TEST(MeasurementCsv, RoundTripIsExactProperty) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1e4, 1e4);
    std::vector<TimeSeriesTask> tasks;
    for (int k = 0; k < 6; ++k) {
        std::vector<double> t, v;
        double now = 0;
        for (int i = 0; i < 40; ++i) {
            now += 0.5 + std::abs(u(rng)) / 100;
            t.push_back(now);
            v.push_back(u(rng) * std::pow(10.0, static_cast<double>(rng() % 20) - 10.0));
        }
        const auto q = static_cast<Quantity>(k % 3);
        tasks.emplace_back("bus" + std::to_string(k) + ".x", "bus" + std::to_string(k), Phase::A, q, t, v);
    }
    std::stringstream ss;
    write_measurements(ss, tasks);
    const auto back = read_measurements(ss);
    ASSERT_EQ(back.size(), tasks.size());
    for (std::size_t k = 0; k < tasks.size(); ++k) {
        EXPECT_EQ(back[k].task_id(), tasks[k].task_id());
        EXPECT_EQ(back[k].quantity(), tasks[k].quantity());
        ASSERT_EQ(back[k].size(), tasks[k].size());
        for (std::size_t i = 0; i < tasks[k].size(); ++i) {
            EXPECT_EQ(back[k][i].t, tasks[k][i].t);
            EXPECT_EQ(back[k][i].value, tasks[k][i].value);
        }
    }
}

TEST(MeasurementCsv, UnsortedRowsAreSorted) {
    std::istringstream is(
        "task_id,bus_id,phase,quantity,timestamp_s,value\n"
        "a,701,A,P_kW,900,2\n"
        "a,701,A,P_kW,0,1\n");
    const auto tasks = read_measurements(is);
    ASSERT_EQ(tasks.size(), 1u);
    EXPECT_EQ(tasks[0][0].value, 1.0);
    EXPECT_EQ(tasks[0][1].t, 900.0);
}

TEST(MeasurementCsv, ErrorsCarryLineNumbers) {
    const std::string header = "task_id,bus_id,phase,quantity,timestamp_s,value\n";
    auto line_of = [](const std::string& text) -> std::size_t {
        std::istringstream is(text);
        try {
            read_measurements(is);
        } catch (const ParseError& e) {
            return e.line();
        }
        return 0;
    };
    EXPECT_EQ(line_of(header + "a,701,A,P_kW,0,1\na,701,A,P_kW,x,1\n"), 3u);
    EXPECT_EQ(line_of(header + "a,701,A,W,0,1\n"), 2u);
    EXPECT_EQ(line_of(header + "a,701,D,P_kW,0,1\n"), 2u);
    EXPECT_EQ(line_of(header + "a,701,A,P_kW,0\n"), 2u);
    EXPECT_EQ(line_of("wrong,header\n"), 1u);

    std::istringstream dup(header + "a,701,A,P_kW,0,1\na,701,A,P_kW,0,2\n");
    EXPECT_THROW(read_measurements(dup), ParseError);
}

TEST(MeasurementCsv, AtomicWriteReplacesFile) {
    const auto dir = std::filesystem::temp_directory_path() / "gridfuse_csv_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "out.csv";
    write_file_atomic(path, "first\n");
    write_file_atomic(path, "second\n");
    std::ifstream in(path);
    std::string s;
    std::getline(in, s);
    EXPECT_EQ(s, "second");
    EXPECT_FALSE(std::filesystem::exists(path.string() + ".tmp"));
    std::filesystem::remove_all(dir);
}
