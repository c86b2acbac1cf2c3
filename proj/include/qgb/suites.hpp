#pragma once
// filled in with the assertion batteries
