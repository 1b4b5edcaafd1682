#pragma once

#include "epicast/error.hpp"

#include <catch_amalgamated.hpp>

#include <string>

// Checks that `expr` throws epicast::Error carrying `code`.
#define REQUIRE_ERROR_CODE(expr, expected)                                              \
    do {                                                                                \
        bool thrown_ = false;                                                           \
        try {                                                                           \
            (void)(expr);                                                               \
        } catch (const epicast::Error& e_) {                                            \
            thrown_ = true;                                                             \
            INFO("message: " << e_.what());                                             \
            REQUIRE(std::string(epicast::to_string(e_.code())) ==                       \
                    std::string(epicast::to_string(expected)));                         \
        }                                                                               \
        if (!thrown_) FAIL("expected " << epicast::to_string(expected) << " from " #expr); \
    } while (false)
