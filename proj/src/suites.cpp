#include "qgb/suites.hpp"
