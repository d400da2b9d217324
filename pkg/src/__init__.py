# critnls - subcommand handlers and services
