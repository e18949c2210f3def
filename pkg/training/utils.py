import logging
import os


def next_run_dir(root):
    # numbered run directories: root/0, root/1, ...
    if os.path.exists(root):
        avail_nums = [-1] + [int(d) for d in os.listdir(root) if d.isdigit()]
        run_num = max(avail_nums) + 1
    else:
        run_num = 0
    return os.path.join(root, str(run_num)), str(run_num)


def setup_logging(log_dir, message="starting new experiment"):
    """Log to a fresh numbered directory under log_dir.

    Args:
        log_dir: Root of the numbered run directories
        message: First line written to the log

    Returns:
        str: The run directory (holds log.txt and the run outputs)
    """
    run_dir, run_num = next_run_dir(log_dir)
    print("Logging in log_dir {}, number {}".format(log_dir, run_num))
    os.makedirs(run_dir, exist_ok=True)

    log_path = os.path.join(run_dir, "log.txt")
    logging.basicConfig(filename=log_path,
                        filemode='a',
                        format='%(asctime)s | %(message)s',
                        datefmt='%m-%d %H:%M:%S',
                        level=logging.INFO, force=True)
    logging.info(message)
    return run_dir
