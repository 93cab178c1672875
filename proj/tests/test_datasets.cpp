#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ca/datasets.hpp"

#include "testutil.hpp"

TEST_CASE("gen_sparse with k = n fills every entry with +-amplitude") {
    const ca::Signal x = ca::gen_sparse(16, 16, 1.0, 3);
    for (int i = 0; i < 16; ++i) REQUIRE(std::abs(x.values[i]) == 1.0);
}

TEST_CASE("gen_sparse places exactly k nonzeros") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const ca::Signal x = ca::gen_sparse(100, 7, 2.5, seed);
        int nonzero = 0;
        for (int i = 0; i < 100; ++i) {
            if (x.values[i] != 0.0) {
                ++nonzero;
                REQUIRE(std::abs(x.values[i]) == 2.5);
            }
        }
        REQUIRE(nonzero == 7);
    }
}

TEST_CASE("gen_sparse is deterministic and validates parameters") {
    REQUIRE(testutil::exact_equal(ca::gen_sparse(32, 4, 1.0, 9).values,
                                  ca::gen_sparse(32, 4, 1.0, 9).values));
    REQUIRE_THROWS_AS(ca::gen_sparse(8, 9, 1.0, 0), ca::parameter_error);
    REQUIRE_THROWS_AS(ca::gen_sparse(8, 0, 1.0, 0), ca::parameter_error);
    REQUIRE_THROWS_AS(ca::gen_sparse(8, 2, 0.0, 0), ca::parameter_error);
}

TEST_CASE("textures are deterministic and stay in range") {
    const ca::GrayImage a = ca::texture_image(64, 64, 5);
    const ca::GrayImage b = ca::texture_image(64, 64, 5);
    REQUIRE(a.pixels == b.pixels);
    for (double p : a.pixels) {
        REQUIRE(p >= 0.0);
        REQUIRE(p <= 1.0);
    }
    REQUIRE(ca::texture_image(64, 64, 6).pixels != a.pixels);
}

TEST_CASE("a zero-amplitude defect collapses the two print classes") {
    const ca::PrintTask task(256, 4, 0.0, 11);
    REQUIRE(testutil::exact_equal(task.templates().templates[0], task.templates().templates[1]));
}

TEST_CASE("template separation equals amplitude times defect side") {
    const ca::PrintTask task(4096, 12, 0.5, 21);
    const double separation =
        (task.templates().templates[1] - task.templates().templates[0]).norm();
    REQUIRE(separation == Catch::Approx(0.5 * 12.0).margin(1e-9));
}

TEST_CASE("the default print task is separable in the raw domain") {
    // Nearest-template decision on the raw signals themselves, no sensing.
    const ca::PrintTask task(16384, 24, 0.5, 1);
    const ca::ClassTemplates& t = task.templates();
    int correct = 0;
    for (const ca::Signal& x : task.canonical_dataset()) {
        int best = 0;
        double best_distance = std::numeric_limits<double>::infinity();
        for (int c = 0; c < t.num_classes(); ++c) {
            const double d = (x.values - t.templates[static_cast<std::size_t>(c)]).norm();
            if (d < best_distance) {
                best_distance = d;
                best = c;
            }
        }
        if (t.classes[static_cast<std::size_t>(best)] == *x.label) ++correct;
    }
    REQUIRE(correct == 2);
}

TEST_CASE("defect samples move the patch, ok samples are the base texture") {
    const ca::PrintTask task(1024, 6, 0.5, 31);
    const ca::Signal ok = task.sample("ok", 77);
    REQUIRE(testutil::exact_equal(ok.values, task.templates().templates[0]));

    const ca::Signal a = task.sample("defect", 1);
    const ca::Signal b = task.sample("defect", 1);
    REQUIRE(testutil::exact_equal(a.values, b.values));
    const ca::Signal c = task.sample("defect", 2);
    REQUIRE(!testutil::exact_equal(a.values, c.values));
    // Every defect instance keeps the same distance from the base texture.
    REQUIRE((a.values - task.templates().templates[0]).norm() ==
            Catch::Approx(0.5 * 6.0).margin(1e-9));
    REQUIRE_THROWS_AS(task.sample("smudge", 0), ca::dataset_error);
}

TEST_CASE("print task validates its geometry") {
    REQUIRE_THROWS_AS(ca::PrintTask(1000, 4, 0.5, 0), ca::parameter_error); // not a square
    REQUIRE_THROWS_AS(ca::PrintTask(64, 9, 0.5, 0), ca::parameter_error);   // patch too large
    REQUIRE_THROWS_AS(ca::PrintTask(64, 0, 0.5, 0), ca::parameter_error);
    REQUIRE_THROWS_AS(ca::PrintTask(64, 2, -0.5, 0), ca::parameter_error);
    REQUIRE_NOTHROW(ca::gen_print_task(64, 8, 0.5, 0)); // patch exactly fills the image
}
