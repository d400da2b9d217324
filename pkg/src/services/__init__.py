# critnls - shared services (logging, CSV export)
